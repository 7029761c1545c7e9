#include "bfem/assembly.hpp"

#include "bfem/error.hpp"

#include <cmath>

namespace bfem {

namespace {

struct QuadPoint {
    std::array<double, 3> bary;
    double weight;  // fraction of the element measure
};

// 2-point Gauss on a segment and the 3-point interior rule on a triangle;
// both exact for quadratics.
const std::vector<QuadPoint>& rule(int dim) {
    static const std::vector<QuadPoint> seg = [] {
        const double s = 0.5 / std::sqrt(3.0);
        return std::vector<QuadPoint>{{{0.5 + s, 0.5 - s, 0.0}, 0.5}, {{0.5 - s, 0.5 + s, 0.0}, 0.5}};
    }();
    static const std::vector<QuadPoint> tri{{{2.0 / 3, 1.0 / 6, 1.0 / 6}, 1.0 / 3},
                                            {{1.0 / 6, 2.0 / 3, 1.0 / 6}, 1.0 / 3},
                                            {{1.0 / 6, 1.0 / 6, 2.0 / 3}, 1.0 / 3}};
    return dim == 1 ? seg : tri;
}

Point map_point(const Mesh& mesh, std::span<const Index> el, const std::array<double, 3>& bary) {
    Point x{0.0, 0.0};
    for (std::size_t a = 0; a < el.size(); ++a) {
        const Point& p = mesh.node(el[a]);
        x[0] += bary[a] * p[0];
        x[1] += bary[a] * p[1];
    }
    return x;
}

// Constant P1 gradients on a triangle: dphi_a/dx = b[a], dphi_a/dy = c[a].
void triangle_gradients(const Mesh& mesh, std::span<const Index> el, double area, double (&b)[3], double (&c)[3]) {
    for (int a = 0; a < 3; ++a) {
        const Point& p1 = mesh.node(el[(a + 1) % 3]);
        const Point& p2 = mesh.node(el[(a + 2) % 3]);
        b[a] = (p1[1] - p2[1]) / (2.0 * area);
        c[a] = (p2[0] - p1[0]) / (2.0 * area);
    }
}

SparseMatrix stiffness_1d(const Mesh& mesh, const Poisson1D& op) {
    if (mesh.dim() != 1) throw InvalidArgument("assemble_stiffness: Poisson1D needs a 1D mesh");
    if (!op.ea) throw InvalidArgument("assemble_stiffness: missing EA coefficient");
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(4 * mesh.num_elements()));
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element(e);
        const double xa = mesh.node(el[0])[0];
        const double xb = mesh.node(el[1])[0];
        const double h = xb - xa;
        double ea_int = 0.0;
        for (const auto& q : rule(1)) ea_int += q.weight * op.ea(map_point(mesh, el, q.bary)[0]);
        const double k = ea_int / std::abs(h);
        t.push_back({el[0], el[0], k});
        t.push_back({el[0], el[1], -k});
        t.push_back({el[1], el[0], -k});
        t.push_back({el[1], el[1], k});
    }
    return SparseMatrix::from_triplets(mesh.num_nodes(), mesh.num_nodes(), t);
}

SparseMatrix stiffness_plane_stress(const Mesh& mesh, const PlaneStress& op) {
    if (mesh.dim() != 2) throw InvalidArgument("assemble_stiffness: PlaneStress needs a 2D mesh");
    if (!(op.E > 0.0) || !(op.nu >= 0.0 && op.nu < 0.5) || !(op.thickness > 0.0))
        throw InvalidArgument("assemble_stiffness: require E > 0, 0 <= nu < 0.5, thickness > 0");
    const auto D = plane_stress_matrix(op);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(36 * mesh.num_elements()));
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element(e);
        const double area = mesh.element_measure(e);
        double b[3], c[3];
        triangle_gradients(mesh, el, area, b, c);
        // B is 3x6 with columns (u0, v0, u1, v1, u2, v2).
        double B[3][6] = {};
        for (int a = 0; a < 3; ++a) {
            B[0][2 * a] = b[a];
            B[1][2 * a + 1] = c[a];
            B[2][2 * a] = c[a];
            B[2][2 * a + 1] = b[a];
        }
        double DB[3][6];
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < 6; ++j) DB[r][j] = D[3 * r] * B[0][j] + D[3 * r + 1] * B[1][j] + D[3 * r + 2] * B[2][j];
        const double scale = area * op.thickness;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                const double v = scale * (B[0][i] * DB[0][j] + B[1][i] * DB[1][j] + B[2][i] * DB[2][j]);
                t.push_back({2 * el[i / 2] + i % 2, 2 * el[j / 2] + j % 2, v});
            }
    }
    const Index n = 2 * mesh.num_nodes();
    return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

int dofs_per_node(const OperatorSpec& op) { return std::holds_alternative<Poisson1D>(op) ? 1 : 2; }

std::array<double, 9> plane_stress_matrix(const PlaneStress& op) {
    const double s = op.E / (1.0 - op.nu * op.nu);
    return {s, s * op.nu, 0.0, s * op.nu, s, 0.0, 0.0, 0.0, s * 0.5 * (1.0 - op.nu)};
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const OperatorSpec& op) {
    if (const auto* p = std::get_if<Poisson1D>(&op)) return stiffness_1d(mesh, *p);
    return stiffness_plane_stress(mesh, std::get<PlaneStress>(op));
}

SparseMatrix assemble_mass(const Mesh& mesh, int dofs_per_node) {
    if (dofs_per_node < 1 || dofs_per_node > 2) throw InvalidArgument("assemble_mass: dofs_per_node must be 1 or 2");
    const int npe = mesh.nodes_per_element();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(npe * npe * dofs_per_node * mesh.num_elements()));
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element(e);
        const double meas = std::abs(mesh.element_measure(e));
        for (int a = 0; a < npe; ++a)
            for (int b = 0; b < npe; ++b) {
                double v = 0.0;
                for (const auto& q : rule(mesh.dim())) v += q.weight * q.bary[a] * q.bary[b];
                v *= meas;
                for (int c = 0; c < dofs_per_node; ++c)
                    t.push_back({dofs_per_node * el[a] + c, dofs_per_node * el[b] + c, v});
            }
    }
    const Index n = dofs_per_node * mesh.num_nodes();
    return SparseMatrix::from_triplets(n, n, t);
}

Vector assemble_load(const Mesh& mesh, const LoadFunction& load, int dofs_per_node) {
    if (dofs_per_node < 1 || dofs_per_node > 2) throw InvalidArgument("assemble_load: dofs_per_node must be 1 or 2");
    Vector f = Vector::Zero(dofs_per_node * mesh.num_nodes());
    const int npe = mesh.nodes_per_element();
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element(e);
        const double meas = std::abs(mesh.element_measure(e));
        for (const auto& q : rule(mesh.dim())) {
            const auto val = load(map_point(mesh, el, q.bary));
            for (int a = 0; a < npe; ++a)
                for (int c = 0; c < dofs_per_node; ++c)
                    f[dofs_per_node * el[a] + c] += meas * q.weight * q.bary[a] * val[static_cast<std::size_t>(c)];
        }
    }
    return f;
}

CoarseOperators restrict_to_coarse(const SparseMatrix& K, const SparseMatrix& M, const Vector& f,
                                   const SparseMatrix& Phi) {
    if (K.rows() != Phi.rows() || M.rows() != Phi.rows() || f.size() != Phi.rows() || K.cols() != K.rows() ||
        M.cols() != M.rows())
        throw InvalidArgument("restrict_to_coarse: shape mismatch");
    return {triple_product(Phi, K), triple_product(Phi, M), Phi.transpose_times(f)};
}

AssembledSystem eliminate_dirichlet(const FullSystem& full, const DofPartition& fine, const DofPartition& coarse) {
    if (fine.interior.empty()) throw InvalidArgument("eliminate_dirichlet: no interior DOFs");
    if (coarse.interior.empty()) throw InvalidArgument("eliminate_dirichlet: no interior coarse DOFs");
    if (fine.num_dofs != full.K.rows() || coarse.num_dofs != full.Phi.cols())
        throw InvalidArgument("eliminate_dirichlet: partition does not match the system");
    AssembledSystem s;
    s.K = full.K.submatrix(fine.interior, fine.interior);
    s.M = full.M.submatrix(fine.interior, fine.interior);
    s.K_id = full.K.submatrix(fine.interior, fine.dirichlet);
    s.f.resize(static_cast<Index>(fine.interior.size()));
    for (std::size_t k = 0; k < fine.interior.size(); ++k) s.f[static_cast<Index>(k)] = full.f[fine.interior[k]];
    s.Phi = full.Phi.submatrix(fine.interior, coarse.interior);
    auto c = restrict_to_coarse(s.K, s.M, s.f, s.Phi);
    s.Kc = std::move(c.Kc);
    s.Mc = std::move(c.Mc);
    s.g = std::move(c.g);
    s.H = s.Phi.transpose() * s.K;
    s.fine = fine;
    s.coarse = coarse;
    return s;
}

AssembledSystem assemble_system(const MeshHierarchy& hierarchy, const OperatorSpec& op, const LoadFunction& load,
                                const std::set<std::string>& dirichlet_tags) {
    const int dpn = dofs_per_node(op);
    FullSystem full{assemble_stiffness(hierarchy.fine, op), assemble_mass(hierarchy.fine, dpn),
                    assemble_load(hierarchy.fine, load, dpn), hierarchy.dof_prolongation(dpn)};
    return eliminate_dirichlet(full, partition_dofs(hierarchy.fine, dirichlet_tags, dpn),
                               partition_dofs(hierarchy.coarse, dirichlet_tags, dpn));
}

}  // namespace bfem
