#pragma once

#include "bfem/sparse_matrix.hpp"

#include <vector>

namespace bfem {

enum class Ordering { Natural, ReverseCuthillMcKee };

/// Reverse Cuthill-McKee permutation of a structurally symmetric matrix.
/// perm[new] = old. Deterministic: ties are broken by degree, then index.
std::vector<Index> reverse_cuthill_mckee(const SparseMatrix& a);

/// Sparse Cholesky factor  P A P^T = L L^T  computed with an up-looking
/// row-by-row algorithm over the elimination tree. Immutable once built;
/// concurrent solves against one factor are safe.
class CholeskyFactor {
public:
    /// Throws NotPositiveDefinite on a non-positive pivot.
    explicit CholeskyFactor(const SparseMatrix& a, Ordering ordering = Ordering::ReverseCuthillMcKee);

    [[nodiscard]] Index size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Index>& permutation() const noexcept { return perm_; }
    [[nodiscard]] const SparseMatrix& lower() const noexcept { return l_; }

    [[nodiscard]] Vector solve(const Vector& b) const;
    /// Column-by-column; each column is bitwise identical to a single solve.
    [[nodiscard]] Matrix solve(const Matrix& b) const;

    /// P^T L z: maps standard normal draws to draws with covariance A.
    [[nodiscard]] Vector correlate(const Vector& z) const;

private:
    Index n_ = 0;
    std::vector<Index> perm_;
    std::vector<Index> inv_perm_;
    SparseMatrix l_;
};

}  // namespace bfem
