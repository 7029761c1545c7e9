#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace bfem {

using Index = std::ptrdiff_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed sparse column matrix. Row indices within each column are
/// sorted and unique; duplicate triplets are summed at construction.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(Index rows, Index cols);

    static SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets);
    static SparseMatrix identity(Index n);
    /// Takes ownership of raw CSC arrays; validates the layout.
    static SparseMatrix from_csc(Index rows, Index cols, std::vector<Index> col_ptr,
                                 std::vector<Index> row_ind, std::vector<double> values);

    [[nodiscard]] Index rows() const noexcept { return rows_; }
    [[nodiscard]] Index cols() const noexcept { return cols_; }
    [[nodiscard]] Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

    [[nodiscard]] std::span<const Index> col_ptr() const noexcept { return col_ptr_; }
    [[nodiscard]] std::span<const Index> row_ind() const noexcept { return row_ind_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Entry (i, j), zero when not stored.
    [[nodiscard]] double coeff(Index i, Index j) const;

    [[nodiscard]] Vector operator*(const Vector& x) const;
    [[nodiscard]] Matrix operator*(const Matrix& x) const;
    /// y = A^T x without forming the transpose.
    [[nodiscard]] Vector transpose_times(const Vector& x) const;

    [[nodiscard]] SparseMatrix transpose() const;
    [[nodiscard]] SparseMatrix scaled(double factor) const;
    [[nodiscard]] SparseMatrix submatrix(std::span<const Index> row_set,
                                         std::span<const Index> col_set) const;

    [[nodiscard]] Matrix to_dense() const;
    [[nodiscard]] std::vector<Triplet> triplets() const;
    [[nodiscard]] Vector diagonal() const;
    [[nodiscard]] double max_abs() const;
    /// max |A_ij - A_ji| <= rel_tol * max |A_ij|.
    [[nodiscard]] bool is_symmetric(double rel_tol = 1e-12) const;

    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) = default;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Index> col_ptr_{0};
    std::vector<Index> row_ind_;
    std::vector<double> values_;
};

/// alpha * A + beta * B over the union pattern.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);

/// A^T B A for square B; the Galerkin triple product.
SparseMatrix triple_product(const SparseMatrix& a, const SparseMatrix& b);

/// Kronecker expansion with I_k, interleaved: entry (i, j) becomes the
/// diagonal block of rows k*i..k*i+k-1 and matching columns.
SparseMatrix expand_blocks(const SparseMatrix& a, int k);

}  // namespace bfem
