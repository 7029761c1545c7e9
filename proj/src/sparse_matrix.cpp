#include "bfem/sparse_matrix.hpp"

#include "bfem/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bfem {

SparseMatrix::SparseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), col_ptr_(static_cast<std::size_t>(cols) + 1, 0) {
    if (rows < 0 || cols < 0) throw InvalidArgument("SparseMatrix: negative dimension");
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::span<const Triplet> triplets) {
    SparseMatrix m(rows, cols);
    std::vector<Index> counts(static_cast<std::size_t>(cols) + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw InvalidArgument("SparseMatrix: triplet (" + std::to_string(t.row) + ", " +
                                  std::to_string(t.col) + ") out of range");
        ++counts[static_cast<std::size_t>(t.col) + 1];
    }
    std::partial_sum(counts.begin(), counts.end(), counts.begin());

    // bucket by column, then sort rows and merge duplicates per column
    std::vector<Index> rows_tmp(triplets.size());
    std::vector<double> vals_tmp(triplets.size());
    std::vector<Index> next(counts.begin(), counts.end() - 1);
    for (const auto& t : triplets) {
        const auto slot = static_cast<std::size_t>(next[static_cast<std::size_t>(t.col)]++);
        rows_tmp[slot] = t.row;
        vals_tmp[slot] = t.value;
    }

    m.row_ind_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::vector<std::size_t> order;
    for (Index j = 0; j < cols; ++j) {
        const auto begin = static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]);
        const auto end = static_cast<std::size_t>(counts[static_cast<std::size_t>(j) + 1]);
        order.resize(end - begin);
        std::iota(order.begin(), order.end(), begin);
        // stable: duplicates are summed in insertion order
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rows_tmp[a] < rows_tmp[b]; });
        for (std::size_t k = 0; k < order.size(); ++k) {
            const Index r = rows_tmp[order[k]];
            if (k > 0 && rows_tmp[order[k - 1]] == r) {
                m.values_.back() += vals_tmp[order[k]];
            } else {
                m.row_ind_.push_back(r);
                m.values_.push_back(vals_tmp[order[k]]);
            }
        }
        m.col_ptr_[static_cast<std::size_t>(j) + 1] = static_cast<Index>(m.values_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
    SparseMatrix m(n, n);
    m.row_ind_.resize(static_cast<std::size_t>(n));
    m.values_.assign(static_cast<std::size_t>(n), 1.0);
    std::iota(m.row_ind_.begin(), m.row_ind_.end(), Index{0});
    std::iota(m.col_ptr_.begin(), m.col_ptr_.end(), Index{0});
    return m;
}

SparseMatrix SparseMatrix::from_csc(Index rows, Index cols, std::vector<Index> col_ptr,
                                    std::vector<Index> row_ind, std::vector<double> values) {
    if (col_ptr.size() != static_cast<std::size_t>(cols) + 1 || col_ptr.front() != 0 ||
        row_ind.size() != values.size() || col_ptr.back() != static_cast<Index>(values.size()))
        throw InvalidArgument("SparseMatrix::from_csc: inconsistent array sizes");
    for (Index j = 0; j < cols; ++j) {
        const auto b = col_ptr[static_cast<std::size_t>(j)];
        const auto e = col_ptr[static_cast<std::size_t>(j) + 1];
        if (e < b) throw InvalidArgument("SparseMatrix::from_csc: column pointers not monotone");
        for (Index p = b; p < e; ++p) {
            const Index r = row_ind[static_cast<std::size_t>(p)];
            if (r < 0 || r >= rows || (p > b && row_ind[static_cast<std::size_t>(p) - 1] >= r))
                throw InvalidArgument("SparseMatrix::from_csc: row indices unsorted or out of range");
        }
    }
    SparseMatrix m(rows, cols);
    m.col_ptr_ = std::move(col_ptr);
    m.row_ind_ = std::move(row_ind);
    m.values_ = std::move(values);
    return m;
}

double SparseMatrix::coeff(Index i, Index j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw InvalidArgument("SparseMatrix::coeff: out of range");
    const auto first = row_ind_.begin() + col_ptr_[static_cast<std::size_t>(j)];
    const auto last = row_ind_.begin() + col_ptr_[static_cast<std::size_t>(j) + 1];
    const auto it = std::lower_bound(first, last, i);
    if (it == last || *it != i) return 0.0;
    return values_[static_cast<std::size_t>(it - row_ind_.begin())];
}

Vector SparseMatrix::operator*(const Vector& x) const {
    if (x.size() != cols_) throw InvalidArgument("SparseMatrix * Vector: dimension mismatch");
    Vector y = Vector::Zero(rows_);
    for (Index j = 0; j < cols_; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        for (Index p = col_ptr_[static_cast<std::size_t>(j)]; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p)
            y[row_ind_[static_cast<std::size_t>(p)]] += values_[static_cast<std::size_t>(p)] * xj;
    }
    return y;
}

Matrix SparseMatrix::operator*(const Matrix& x) const {
    if (x.rows() != cols_) throw InvalidArgument("SparseMatrix * Matrix: dimension mismatch");
    Matrix y(rows_, x.cols());
    for (Index c = 0; c < x.cols(); ++c) y.col(c) = (*this) * Vector(x.col(c));
    return y;
}

Vector SparseMatrix::transpose_times(const Vector& x) const {
    if (x.size() != rows_) throw InvalidArgument("SparseMatrix::transpose_times: dimension mismatch");
    Vector y(cols_);
    for (Index j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (Index p = col_ptr_[static_cast<std::size_t>(j)]; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p)
            s += values_[static_cast<std::size_t>(p)] * x[row_ind_[static_cast<std::size_t>(p)]];
        y[j] = s;
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t(cols_, rows_);
    std::vector<Index> counts(static_cast<std::size_t>(rows_) + 1, 0);
    for (const Index r : row_ind_) ++counts[static_cast<std::size_t>(r) + 1];
    std::partial_sum(counts.begin(), counts.end(), counts.begin());
    t.col_ptr_ = counts;
    t.row_ind_.resize(row_ind_.size());
    t.values_.resize(values_.size());
    std::vector<Index> next(counts.begin(), counts.end() - 1);
    // columns visited in order, so rows of the transpose come out sorted
    for (Index j = 0; j < cols_; ++j) {
        for (Index p = col_ptr_[static_cast<std::size_t>(j)]; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p) {
            const auto slot = static_cast<std::size_t>(next[static_cast<std::size_t>(row_ind_[static_cast<std::size_t>(p)])]++);
            t.row_ind_[slot] = j;
            t.values_[slot] = values_[static_cast<std::size_t>(p)];
        }
    }
    return t;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
    SparseMatrix s = *this;
    for (auto& v : s.values_) v *= factor;
    return s;
}

SparseMatrix SparseMatrix::submatrix(std::span<const Index> row_set, std::span<const Index> col_set) const {
    std::vector<Index> row_map(static_cast<std::size_t>(rows_), -1);
    for (std::size_t k = 0; k < row_set.size(); ++k) {
        const Index r = row_set[k];
        if (r < 0 || r >= rows_) throw InvalidArgument("SparseMatrix::submatrix: row index out of range");
        row_map[static_cast<std::size_t>(r)] = static_cast<Index>(k);
    }
    std::vector<Triplet> out;
    for (std::size_t c = 0; c < col_set.size(); ++c) {
        const Index j = col_set[c];
        if (j < 0 || j >= cols_) throw InvalidArgument("SparseMatrix::submatrix: column index out of range");
        for (Index p = col_ptr_[static_cast<std::size_t>(j)]; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p) {
            const Index r = row_map[static_cast<std::size_t>(row_ind_[static_cast<std::size_t>(p)])];
            if (r >= 0) out.push_back({r, static_cast<Index>(c), values_[static_cast<std::size_t>(p)]});
        }
    }
    return from_triplets(static_cast<Index>(row_set.size()), static_cast<Index>(col_set.size()), out);
}

Matrix SparseMatrix::to_dense() const {
    Matrix d = Matrix::Zero(rows_, cols_);
    for (Index j = 0; j < cols_; ++j)
        for (Index p = col_ptr_[static_cast<std::size_t>(j)]; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p)
            d(row_ind_[static_cast<std::size_t>(p)], j) = values_[static_cast<std::size_t>(p)];
    return d;
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (Index j = 0; j < cols_; ++j)
        for (Index p = col_ptr_[static_cast<std::size_t>(j)]; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p)
            out.push_back({row_ind_[static_cast<std::size_t>(p)], j, values_[static_cast<std::size_t>(p)]});
    return out;
}

Vector SparseMatrix::diagonal() const {
    const Index n = std::min(rows_, cols_);
    Vector d(n);
    for (Index i = 0; i < n; ++i) d[i] = coeff(i, i);
    return d;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (const double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
    if (rows_ != cols_) return false;
    const SparseMatrix diff = add(*this, transpose(), 1.0, -1.0);
    return diff.max_abs() <= rel_tol * max_abs();
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("SparseMatrix product: dimension mismatch");
    SparseMatrix c(a.rows_, b.cols_);
    std::vector<double> work(static_cast<std::size_t>(a.rows_), 0.0);
    std::vector<Index> mark(static_cast<std::size_t>(a.rows_), -1);
    std::vector<Index> pattern;
    for (Index j = 0; j < b.cols_; ++j) {
        pattern.clear();
        for (Index pb = b.col_ptr_[static_cast<std::size_t>(j)]; pb < b.col_ptr_[static_cast<std::size_t>(j) + 1]; ++pb) {
            const Index k = b.row_ind_[static_cast<std::size_t>(pb)];
            const double bkj = b.values_[static_cast<std::size_t>(pb)];
            for (Index pa = a.col_ptr_[static_cast<std::size_t>(k)]; pa < a.col_ptr_[static_cast<std::size_t>(k) + 1]; ++pa) {
                const auto i = static_cast<std::size_t>(a.row_ind_[static_cast<std::size_t>(pa)]);
                if (mark[i] != j) {
                    mark[i] = j;
                    work[i] = 0.0;
                    pattern.push_back(static_cast<Index>(i));
                }
                work[i] += a.values_[static_cast<std::size_t>(pa)] * bkj;
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (const Index i : pattern) {
            c.row_ind_.push_back(i);
            c.values_.push_back(work[static_cast<std::size_t>(i)]);
        }
        c.col_ptr_[static_cast<std::size_t>(j) + 1] = static_cast<Index>(c.values_.size());
    }
    return c;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("add: dimension mismatch");
    std::vector<Index> col_ptr(static_cast<std::size_t>(a.cols()) + 1, 0);
    std::vector<Index> row_ind;
    std::vector<double> values;
    row_ind.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
    values.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
    const auto ap = a.col_ptr(), ar = a.row_ind();
    const auto bp = b.col_ptr(), br = b.row_ind();
    const auto av = a.values(), bv = b.values();
    for (Index j = 0; j < a.cols(); ++j) {
        auto pa = ap[static_cast<std::size_t>(j)], ea = ap[static_cast<std::size_t>(j) + 1];
        auto pb = bp[static_cast<std::size_t>(j)], eb = bp[static_cast<std::size_t>(j) + 1];
        while (pa < ea || pb < eb) {
            const Index ra = pa < ea ? ar[static_cast<std::size_t>(pa)] : a.rows();
            const Index rb = pb < eb ? br[static_cast<std::size_t>(pb)] : b.rows();
            if (ra == rb) {
                row_ind.push_back(ra);
                values.push_back(alpha * av[static_cast<std::size_t>(pa++)] + beta * bv[static_cast<std::size_t>(pb++)]);
            } else if (ra < rb) {
                row_ind.push_back(ra);
                values.push_back(alpha * av[static_cast<std::size_t>(pa++)]);
            } else {
                row_ind.push_back(rb);
                values.push_back(beta * bv[static_cast<std::size_t>(pb++)]);
            }
        }
        col_ptr[static_cast<std::size_t>(j) + 1] = static_cast<Index>(values.size());
    }
    return SparseMatrix::from_csc(a.rows(), a.cols(), std::move(col_ptr), std::move(row_ind), std::move(values));
}

SparseMatrix triple_product(const SparseMatrix& a, const SparseMatrix& b) {
    if (b.rows() != b.cols() || a.rows() != b.rows()) throw InvalidArgument("triple_product: dimension mismatch");
    return a.transpose() * (b * a);
}

SparseMatrix expand_blocks(const SparseMatrix& a, int k) {
    if (k < 1) throw InvalidArgument("expand_blocks: block size must be positive");
    if (k == 1) return a;
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nnz() * k));
    for (const auto& e : a.triplets())
        for (int c = 0; c < k; ++c) t.push_back({k * e.row + c, k * e.col + c, e.value});
    return SparseMatrix::from_triplets(k * a.rows(), k * a.cols(), t);
}

}  // namespace bfem
