#include "bfem/dense_eigen.hpp"

#include "bfem/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bfem {

double relative_asymmetry(const Matrix& a) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

SymmetricEigen sym_eig(const Matrix& a, Index cap, double sym_tol) {
    if (a.rows() != a.cols()) throw InvalidArgument("sym_eig: matrix not square");
    if (a.rows() > cap) throw CapacityError(a.rows(), cap);
    const Index n = a.rows();
    if (n == 0) return {};
    if (relative_asymmetry(a) > sym_tol) throw InvalidArgument("sym_eig: matrix not symmetric");

    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw StageError("sym_eig", "eigensolver did not converge");

    // stable: tied eigenvalues keep the solver's index order
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const Vector& ev = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return ev[x] > ev[y]; });

    SymmetricEigen out{Matrix(n, n), Vector(n)};
    for (Index k = 0; k < n; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        out.values[k] = ev[src];
        Vector q = solver.eigenvectors().col(src);
        Index arg = 0;
        for (Index i = 1; i < n; ++i)
            if (std::abs(q[i]) > std::abs(q[arg])) arg = i;
        if (q[arg] < 0.0) q = -q;
        out.vectors.col(k) = q;
    }
    return out;
}

}  // namespace bfem
