#include "bfem/cholesky.hpp"

#include "bfem/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace bfem {

namespace {

struct Graph {
    std::vector<std::vector<Index>> adj;
};

Graph symmetric_graph(const SparseMatrix& a) {
    Graph g;
    g.adj.resize(static_cast<std::size_t>(a.rows()));
    const auto cp = a.col_ptr();
    const auto ri = a.row_ind();
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index p = cp[j]; p < cp[j + 1]; ++p) {
            const Index i = ri[p];
            if (i == j) continue;
            g.adj[i].push_back(j);
            g.adj[j].push_back(i);
        }
    }
    for (auto& nb : g.adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return g;
}

// BFS level structure over nodes not yet ordered.
std::vector<std::vector<Index>> level_structure(const Graph& g, Index root, const std::vector<char>& done) {
    std::vector<std::vector<Index>> levels{{root}};
    std::vector<char> seen(done);
    seen[root] = 1;
    while (true) {
        std::vector<Index> next;
        for (const Index v : levels.back())
            for (const Index w : g.adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                }
        if (next.empty()) break;
        levels.push_back(std::move(next));
    }
    return levels;
}

Index pseudo_peripheral(const Graph& g, Index start, const std::vector<char>& done) {
    Index root = start;
    auto levels = level_structure(g, root, done);
    while (true) {
        const auto& last = levels.back();
        const Index cand = *std::min_element(last.begin(), last.end(), [&](Index a, Index b) {
            const auto da = g.adj[a].size(), db = g.adj[b].size();
            return da != db ? da < db : a < b;
        });
        auto cand_levels = level_structure(g, cand, done);
        if (cand_levels.size() <= levels.size()) return root;
        root = cand;
        levels = std::move(cand_levels);
    }
}

// Upper triangle of P A P^T in CSC.
SparseMatrix permuted_upper(const SparseMatrix& a, const std::vector<Index>& inv) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nnz() / 2 + a.rows()));
    for (const auto& e : a.triplets()) {
        const Index r = inv[e.row];
        const Index c = inv[e.col];
        if (r <= c) t.push_back({r, c, e.value});
    }
    return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

// Nonzero pattern of row k of L, in topological order s[top..n).
Index ereach(const SparseMatrix& c, Index k, const std::vector<Index>& parent, std::vector<Index>& s,
             std::vector<Index>& w) {
    const Index n = c.cols();
    Index top = n;
    w[k] = k;
    const auto cp = c.col_ptr();
    const auto ri = c.row_ind();
    for (Index p = cp[k]; p < cp[k + 1]; ++p) {
        Index i = ri[p];
        if (i > k) continue;
        Index len = 0;
        for (; w[i] != k; i = parent[i]) {
            s[len++] = i;
            w[i] = k;
        }
        while (len > 0) s[--top] = s[--len];
    }
    return top;
}

}  // namespace

std::vector<Index> reverse_cuthill_mckee(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidArgument("reverse_cuthill_mckee: matrix not square");
    const Index n = a.rows();
    const Graph g = symmetric_graph(a);
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n));

    auto by_degree = [&](Index x, Index y) {
        const auto dx = g.adj[x].size(), dy = g.adj[y].size();
        return dx != dy ? dx < dy : x < y;
    };

    while (static_cast<Index>(order.size()) < n) {
        Index start = -1;
        for (Index v = 0; v < n; ++v)
            if (!done[v] && (start < 0 || by_degree(v, start))) start = v;
        const Index root = pseudo_peripheral(g, start, done);

        std::deque<Index> queue{root};
        done[root] = 1;
        while (!queue.empty()) {
            const Index v = queue.front();
            queue.pop_front();
            order.push_back(v);
            std::vector<Index> fresh;
            for (const Index w : g.adj[v])
                if (!done[w]) fresh.push_back(w);
            std::sort(fresh.begin(), fresh.end(), by_degree);
            for (const Index w : fresh) {
                done[w] = 1;
                queue.push_back(w);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

CholeskyFactor::CholeskyFactor(const SparseMatrix& a, Ordering ordering) : n_(a.rows()) {
    if (a.rows() != a.cols()) throw InvalidArgument("cholesky: matrix not square");
    if (ordering == Ordering::ReverseCuthillMcKee) {
        perm_ = reverse_cuthill_mckee(a);
    } else {
        perm_.resize(static_cast<std::size_t>(n_));
        std::iota(perm_.begin(), perm_.end(), Index{0});
    }
    inv_perm_.resize(static_cast<std::size_t>(n_));
    for (Index k = 0; k < n_; ++k) inv_perm_[perm_[k]] = k;

    const SparseMatrix c = permuted_upper(a, inv_perm_);
    const auto cp = c.col_ptr();
    const auto ci = c.row_ind();
    const auto cx = c.values();

    // elimination tree
    std::vector<Index> parent(static_cast<std::size_t>(n_), -1);
    {
        std::vector<Index> ancestor(static_cast<std::size_t>(n_), -1);
        for (Index k = 0; k < n_; ++k) {
            for (Index p = cp[k]; p < cp[k + 1]; ++p) {
                Index i = ci[p];
                while (i != -1 && i < k) {
                    const Index next = ancestor[i];
                    ancestor[i] = k;
                    if (next == -1) parent[i] = k;
                    i = next;
                }
            }
        }
    }

    std::vector<Index> s(static_cast<std::size_t>(n_));
    std::vector<Index> w(static_cast<std::size_t>(n_), -1);

    // symbolic: column counts from row patterns
    std::vector<Index> lp(static_cast<std::size_t>(n_) + 1, 0);
    for (Index k = 0; k < n_; ++k) {
        ++lp[k + 1];
        const Index top = ereach(c, k, parent, s, w);
        for (Index t = top; t < n_; ++t) ++lp[s[t] + 1];
    }
    std::partial_sum(lp.begin(), lp.end(), lp.begin());
    std::vector<Index> li(static_cast<std::size_t>(lp.back()));
    std::vector<double> lx(static_cast<std::size_t>(lp.back()));
    std::vector<Index> next(lp.begin(), lp.end() - 1);

    std::fill(w.begin(), w.end(), -1);
    std::vector<double> x(static_cast<std::size_t>(n_), 0.0);
    for (Index k = 0; k < n_; ++k) {
        const Index top = ereach(c, k, parent, s, w);
        x[k] = 0.0;
        for (Index p = cp[k]; p < cp[k + 1]; ++p)
            if (ci[p] <= k) x[ci[p]] = cx[p];
        double d = x[k];
        x[k] = 0.0;
        for (Index t = top; t < n_; ++t) {
            const Index i = s[t];
            const double lki = x[i] / lx[lp[i]];
            x[i] = 0.0;
            for (Index p = lp[i] + 1; p < next[i]; ++p) x[li[p]] -= lx[p] * lki;
            d -= lki * lki;
            const Index p = next[i]++;
            li[p] = k;
            lx[p] = lki;
        }
        if (!(d > 0.0)) throw NotPositiveDefinite(k, perm_[k], d);
        const Index p = next[k]++;
        li[p] = k;
        lx[p] = std::sqrt(d);
    }
    l_ = SparseMatrix::from_csc(n_, n_, std::move(lp), std::move(li), std::move(lx));
}

Vector CholeskyFactor::solve(const Vector& b) const {
    if (b.size() != n_) throw InvalidArgument("cholesky solve: dimension mismatch");
    const auto lp = l_.col_ptr();
    const auto li = l_.row_ind();
    const auto lx = l_.values();
    Vector x(n_);
    for (Index k = 0; k < n_; ++k) x[k] = b[perm_[k]];
    for (Index j = 0; j < n_; ++j) {
        x[j] /= lx[lp[j]];
        const double xj = x[j];
        for (Index p = lp[j] + 1; p < lp[j + 1]; ++p) x[li[p]] -= lx[p] * xj;
    }
    for (Index j = n_ - 1; j >= 0; --j) {
        double xj = x[j];
        for (Index p = lp[j] + 1; p < lp[j + 1]; ++p) xj -= lx[p] * x[li[p]];
        x[j] = xj / lx[lp[j]];
    }
    Vector out(n_);
    for (Index k = 0; k < n_; ++k) out[perm_[k]] = x[k];
    return out;
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
    if (b.rows() != n_) throw InvalidArgument("cholesky solve: dimension mismatch");
    Matrix out(n_, b.cols());
    for (Index c = 0; c < b.cols(); ++c) out.col(c) = solve(Vector(b.col(c)));
    return out;
}

Vector CholeskyFactor::correlate(const Vector& z) const {
    if (z.size() != n_) throw InvalidArgument("cholesky correlate: dimension mismatch");
    const Vector y = l_ * z;
    Vector out(n_);
    for (Index k = 0; k < n_; ++k) out[perm_[k]] = y[k];
    return out;
}

}  // namespace bfem
