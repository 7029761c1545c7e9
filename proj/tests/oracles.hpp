// Independent reference computations shared by the unit tests and the
// acceptance runner. Everything here is dense and deliberately naive.
#pragma once

#include "bfem/assembly.hpp"
#include "bfem/mesh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace oracle {

using bfem::Index;
using bfem::Matrix;
using bfem::Vector;

inline constexpr double kEaA = 0.1;
inline constexpr double kEaB = 0.099;

inline double bar_ea(double x) { return kEaA - kEaB * x; }

/// Closed-form solution of -(EA u')' = 1 on (0, 1), u(0) = u(1) = 0,
/// EA = a - b x.
inline double bar_exact(double x) {
    const double a = kEaA, b = kEaB;
    return x / b - std::log((a - b * x) / a) / (b * std::log((a - b) / a));
}

/// Bar stiffness on a uniform mesh of n elements from the closed-form
/// element integral of the linear coefficient (full node set).
inline Matrix bar_stiffness(Index n, double length = 1.0) {
    const double h = length / static_cast<double>(n);
    Matrix K = Matrix::Zero(n + 1, n + 1);
    for (Index e = 0; e < n; ++e) {
        const double x0 = h * static_cast<double>(e);
        const double x1 = x0 + h;
        // int_x0^x1 (a - b x) dx / h^2
        const double k = (kEaA * h - 0.5 * kEaB * (x1 * x1 - x0 * x0)) / (h * h);
        K(e, e) += k;
        K(e + 1, e + 1) += k;
        K(e, e + 1) -= k;
        K(e + 1, e) -= k;
    }
    return K;
}

/// Unit load vector on a uniform mesh: h per interior node, h/2 at the ends.
inline Vector bar_load(Index n, double length = 1.0) {
    const double h = length / static_cast<double>(n);
    Vector f = Vector::Constant(n + 1, h);
    f[0] = f[n] = 0.5 * h;
    return f;
}

/// Consistent P1 mass matrix on a uniform mesh of n elements.
inline Matrix bar_mass(Index n, double length = 1.0) {
    const double h = length / static_cast<double>(n);
    Matrix M = Matrix::Zero(n + 1, n + 1);
    for (Index e = 0; e < n; ++e) {
        M(e, e) += h / 3.0;
        M(e + 1, e + 1) += h / 3.0;
        M(e, e + 1) += h / 6.0;
        M(e + 1, e) += h / 6.0;
    }
    return M;
}

/// Rows/columns 1..n-1 of a full bar matrix (both ends clamped).
inline Matrix interior(const Matrix& a) { return a.block(1, 1, a.rows() - 2, a.cols() - 2); }
inline Vector interior(const Vector& v) { return v.segment(1, v.size() - 2); }

/// Mixed stiffness int EA psi_i' phi_j' with coarse test and fine trial
/// functions on nested uniform 1D meshes, spatially ordered.
inline Matrix bar_mixed_stiffness(Index m, Index n) {
    const double H = 1.0 / static_cast<double>(m);
    const double h = 1.0 / static_cast<double>(n);
    Matrix out = Matrix::Zero(m + 1, n + 1);
    for (Index e = 0; e < n; ++e) {
        const double x0 = h * static_cast<double>(e);
        const double x1 = x0 + h;
        const Index E = static_cast<Index>(std::floor((0.5 * (x0 + x1)) / H));
        const double ea_int = kEaA * h - 0.5 * kEaB * (x1 * x1 - x0 * x0);
        // coarse slopes on element E: -1/H for node E, +1/H for node E+1
        const double dpsi[2] = {-1.0 / H, 1.0 / H};
        const double dphi[2] = {-1.0 / h, 1.0 / h};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out(E + a, e + b) += ea_int * dpsi[a] * dphi[b];
    }
    return out;
}

/// Hat-function prolongation between nested uniform meshes, spatial order.
inline Matrix bar_prolongation(Index m, Index n) {
    const double H = 1.0 / static_cast<double>(m);
    Matrix P = Matrix::Zero(n + 1, m + 1);
    for (Index j = 0; j <= n; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(n);
        for (Index i = 0; i <= m; ++i) P(j, i) = std::max(0.0, 1.0 - std::abs(x - H * static_cast<double>(i)) / H);
    }
    return P;
}

/// Fine-node permutation: spatial index of each fine node of a refined bar.
inline std::vector<Index> spatial_index(const bfem::Mesh& fine) {
    const Index n = fine.num_elements();
    std::vector<Index> out(static_cast<std::size_t>(fine.num_nodes()));
    for (Index k = 0; k < fine.num_nodes(); ++k)
        out[static_cast<std::size_t>(k)] = static_cast<Index>(std::lround(fine.node(k)[0] * static_cast<double>(n)));
    return out;
}

/// Constant-strain strain-displacement matrix and twice the signed area.
inline std::pair<Eigen::Matrix<double, 3, 6>, double> cst_b(const bfem::Point& p0, const bfem::Point& p1,
                                                             const bfem::Point& p2) {
    const double x[3] = {p0[0], p1[0], p2[0]};
    const double y[3] = {p0[1], p1[1], p2[1]};
    const double area2 = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    const double b[3] = {y[1] - y[2], y[2] - y[0], y[0] - y[1]};
    const double c[3] = {x[2] - x[1], x[0] - x[2], x[1] - x[0]};
    for (int a = 0; a < 3; ++a) {
        B(0, 2 * a) = b[a] / area2;
        B(1, 2 * a + 1) = c[a] / area2;
        B(2, 2 * a) = c[a] / area2;
        B(2, 2 * a + 1) = b[a] / area2;
    }
    return {B, area2};
}

inline Eigen::Matrix3d plane_stress_d(double E, double nu) {
    Eigen::Matrix3d D;
    D << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu);
    return D * (E / (1.0 - nu * nu));
}

/// Constant-strain triangle stiffness, plane stress, written out longhand.
inline Matrix cst_stiffness(const bfem::Point& p0, const bfem::Point& p1, const bfem::Point& p2, double E,
                            double nu, double t) {
    const auto [B, area2] = cst_b(p0, p1, p2);
    return 0.5 * area2 * t * B.transpose() * plane_stress_d(E, nu) * B;
}

/// Coarse hat functions evaluated at the fine nodes through barycentric
/// coordinates in the parent triangle (fine nodes x coarse nodes).
inline Matrix plate_prolongation(const bfem::MeshHierarchy& h) {
    Matrix P = Matrix::Zero(h.fine.num_nodes(), h.coarse.num_nodes());
    for (Index e = 0; e < h.fine.num_elements(); ++e) {
        const auto ce = h.coarse.element(h.parent_map[static_cast<std::size_t>(e)]);
        const auto& a = h.coarse.node(ce[0]);
        const auto& b = h.coarse.node(ce[1]);
        const auto& c = h.coarse.node(ce[2]);
        const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        for (const Index j : h.fine.element(e)) {
            const auto& x = h.fine.node(j);
            const double l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
            const double l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
            P(j, ce[0]) = 1.0 - l1 - l2;
            P(j, ce[1]) = l1;
            P(j, ce[2]) = l2;
        }
    }
    return P;
}

/// Interleave a scalar operator over k components.
inline Matrix expand(const Matrix& a, int k) {
    Matrix out = Matrix::Zero(k * a.rows(), k * a.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            for (int c = 0; c < k; ++c) out(k * i + c, k * j + c) = a(i, j);
    return out;
}

/// Mixed plane-stress stiffness with coarse test and fine trial functions,
/// integrated over the fine elements (full DOF sets, coarse rows).
inline Matrix plate_mixed_stiffness(const bfem::MeshHierarchy& h, double E, double nu, double t) {
    Matrix out = Matrix::Zero(2 * h.coarse.num_nodes(), 2 * h.fine.num_nodes());
    const Eigen::Matrix3d D = plane_stress_d(E, nu);
    for (Index e = 0; e < h.fine.num_elements(); ++e) {
        const auto fe = h.fine.element(e);
        const auto ce = h.coarse.element(h.parent_map[static_cast<std::size_t>(e)]);
        const auto [Bf, area2] = cst_b(h.fine.node(fe[0]), h.fine.node(fe[1]), h.fine.node(fe[2]));
        const auto Bc = cst_b(h.coarse.node(ce[0]), h.coarse.node(ce[1]), h.coarse.node(ce[2])).first;
        const Matrix ke = 0.5 * area2 * t * Bc.transpose() * D * Bf;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) out(2 * ce[i / 2] + i % 2, 2 * fe[j / 2] + j % 2) += ke(i, j);
    }
    return out;
}

/// Direct coarse assembly for plane stress: stiffness and constant body
/// load (fx, fy) over the full coarse DOF set.
inline std::pair<Matrix, Vector> plate_direct(const bfem::Mesh& mesh, double E, double nu, double t, double fx,
                                              double fy) {
    const Index n = 2 * mesh.num_nodes();
    Matrix K = Matrix::Zero(n, n);
    Vector f = Vector::Zero(n);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto el = mesh.element(e);
        const Matrix ke = cst_stiffness(mesh.node(el[0]), mesh.node(el[1]), mesh.node(el[2]), E, nu, t);
        const double area = mesh.element_measure(e);
        for (int i = 0; i < 6; ++i) {
            const Index gi = 2 * el[i / 2] + i % 2;
            for (int j = 0; j < 6; ++j) K(gi, 2 * el[j / 2] + j % 2) += ke(i, j);
            f[gi] += area / 3.0 * (i % 2 == 0 ? fx : fy);
        }
    }
    return {K, f};
}

inline Matrix select(const Matrix& a, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = a(rows[i], cols[j]);
    return out;
}

inline Vector select(const Vector& v, const std::vector<Index>& rows) {
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = v[rows[i]];
    return out;
}

/// Cyclic Jacobi eigensolver: off-diagonal tolerance 1e-12 (relative to the
/// Frobenius norm), at most 100 sweeps. Returns unsorted (values, vectors).
inline std::pair<Vector, Matrix> jacobi_eig(Matrix a) {
    const Index n = a.rows();
    Matrix v = Matrix::Identity(n, n);
    const double scale = std::max(a.norm(), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index p = 0; p < n; ++p)
            for (Index q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-12 * scale) break;
        for (Index p = 0; p < n; ++p)
            for (Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    return {a.diagonal(), v};
}

/// Dense posterior from the displacement-space formulas:
/// Sigma = K^-1 Sigma_f K^-1, H = Phi^T K,
/// m* = Sigma H^T (H Sigma H^T + s^2 I)^-1 g, Sigma* = Sigma - Sigma H^T (.)^-1 H Sigma.
struct DensePosterior {
    Matrix prior;
    Matrix cov;
    Vector mean;
};

inline DensePosterior dense_posterior(const Matrix& K, const Matrix& sigma_f, const Matrix& Phi, const Vector& f,
                                      double sigma_e) {
    const Matrix Kinv = K.ldlt().solve(Matrix::Identity(K.rows(), K.cols()));
    const Matrix sigma = Kinv * sigma_f * Kinv;
    const Matrix H = Phi.transpose() * K;
    const Matrix S = H * sigma * H.transpose() + sigma_e * sigma_e * Matrix::Identity(H.rows(), H.rows());
    const Matrix gain = sigma * H.transpose() * S.ldlt().solve(Matrix::Identity(S.rows(), S.cols()));
    DensePosterior out;
    out.prior = sigma;
    out.mean = gain * (Phi.transpose() * f);
    out.cov = sigma - gain * H * sigma;
    return out;
}

inline double rel(const Vector& a, const Vector& b) { return (a - b).norm() / b.norm(); }
inline double rel_max(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace oracle
