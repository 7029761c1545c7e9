#pragma once

#include "bfem/sparse_matrix.hpp"

namespace bfem {

inline constexpr Index kDefaultDenseCap = 4096;

struct SymmetricEigen {
    Matrix vectors;  ///< Q, orthonormal columns
    Vector values;   ///< descending
};

/// Eigendecomposition A = Q diag(values) Q^T of a dense symmetric matrix.
///
/// Eigenvalues come out in descending order; ties keep the order in which the
/// solver reported them. Each eigenvector is signed so that its entry of
/// largest magnitude is positive (first such entry on exact ties), which
/// makes Q reproducible for golden tests.
///
/// Throws InvalidArgument when A is not square or not symmetric within
/// `sym_tol * max|A|`, and CapacityError above `cap`.
SymmetricEigen sym_eig(const Matrix& a, Index cap = kDefaultDenseCap, double sym_tol = 1e-10);

/// max |A - A^T| relative to max |A| (0 for the zero matrix).
double relative_asymmetry(const Matrix& a);

}  // namespace bfem
