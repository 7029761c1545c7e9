#include "bfem/cholesky.hpp"
#include "bfem/dense_eigen.hpp"
#include "bfem/error.hpp"
#include "bfem/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace bfem;

namespace {

SparseMatrix from_dense(const Matrix& a) {
    std::vector<Triplet> t;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (a(i, j) != 0.0) t.push_back({i, j, a(i, j)});
    return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

// Random sparse SPD matrix: 2D grid Laplacian plus a random diagonal shift.
SparseMatrix grid_spd(Index side, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Triplet> t;
    auto id = [side](Index i, Index j) { return i * side + j; };
    for (Index i = 0; i < side; ++i)
        for (Index j = 0; j < side; ++j) {
            const Index k = id(i, j);
            t.push_back({k, k, 4.0 + rng.next_unit()});
            if (i + 1 < side) {
                t.push_back({k, id(i + 1, j), -1.0});
                t.push_back({id(i + 1, j), k, -1.0});
            }
            if (j + 1 < side) {
                t.push_back({k, id(i, j + 1), -1.0});
                t.push_back({id(i, j + 1), k, -1.0});
            }
        }
    return SparseMatrix::from_triplets(side * side, side * side, t);
}

}  // namespace

TEST(SparseMatrix, TripletsSumDuplicatesAndSortRows) {
    const std::vector<Triplet> t{{2, 0, 1.0}, {0, 0, 2.0}, {2, 0, 3.0}, {1, 1, 5.0}};
    const auto a = SparseMatrix::from_triplets(3, 2, t);
    EXPECT_EQ(a.nnz(), 3);
    EXPECT_DOUBLE_EQ(a.coeff(2, 0), 4.0);
    EXPECT_DOUBLE_EQ(a.coeff(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(a.coeff(0, 1), 0.0);
    EXPECT_EQ(a.row_ind()[0], 0);
    EXPECT_EQ(a.row_ind()[1], 2);
}

TEST(SparseMatrix, ProductsMatchDense) {
    const SparseMatrix a = grid_spd(4, 1);
    const Matrix d = a.to_dense();
    CounterRng rng(3);
    const Vector x = gaussian_vector(rng, a.cols());
    EXPECT_LT((a * x - d * x).norm(), 1e-13);
    EXPECT_LT((a.transpose_times(x) - d.transpose() * x).norm(), 1e-13);
    const SparseMatrix p = SparseMatrix::from_triplets(16, 3, std::vector<Triplet>{{0, 0, 1.0}, {5, 1, 0.5}, {15, 2, 2.0}});
    EXPECT_LT((triple_product(p, a).to_dense() - p.to_dense().transpose() * d * p.to_dense()).cwiseAbs().maxCoeff(),
              1e-13);
    EXPECT_LT((add(a, a, 2.0, -0.5).to_dense() - 1.5 * d).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SparseMatrix, ExpandBlocksInterleaves) {
    const auto a = SparseMatrix::from_triplets(2, 1, std::vector<Triplet>{{0, 0, 1.0}, {1, 0, 0.5}});
    const Matrix e = expand_blocks(a, 2).to_dense();
    Matrix expected(4, 2);
    expected << 1, 0, 0, 1, 0.5, 0, 0, 0.5;
    EXPECT_EQ(e, expected);
}

TEST(Cholesky, IdentityFactorIsIdentity) {
    const CholeskyFactor f(SparseMatrix::identity(7));
    EXPECT_EQ(f.lower().to_dense(), Matrix(Matrix::Identity(7, 7)));
}

TEST(Cholesky, ZeroDiagonalBlockIsNotPositiveDefinite) {
    Matrix a = Matrix::Identity(4, 4);
    a(2, 2) = 0.0;
    a(3, 3) = 0.0;
    try {
        const CholeskyFactor f(from_dense(a), Ordering::Natural);
        FAIL() << "expected NotPositiveDefinite";
    } catch (const NotPositiveDefinite& e) {
        EXPECT_EQ(e.pivot(), 2);
        EXPECT_EQ(e.original_index(), 2);
    }
}

TEST(Cholesky, ReconstructsPermutedMatrix) {
    const SparseMatrix a = grid_spd(6, 11);
    const CholeskyFactor f(a);
    const auto& perm = f.permutation();
    const Matrix d = a.to_dense();
    Matrix pap(d.rows(), d.cols());
    for (Index i = 0; i < d.rows(); ++i)
        for (Index j = 0; j < d.cols(); ++j) pap(i, j) = d(perm[i], perm[j]);
    const Matrix l = f.lower().to_dense();
    EXPECT_LT((l * l.transpose() - pap).norm() / pap.norm(), 1e-10);
    EXPECT_TRUE(l.isLowerTriangular());
}

TEST(Cholesky, SolveRoundTripAndZeroRhs) {
    const SparseMatrix a = grid_spd(8, 5);
    const CholeskyFactor f(a);
    CounterRng rng(9);
    const Vector x = gaussian_vector(rng, a.rows());
    EXPECT_LT((f.solve(Vector(a * x)) - x).norm() / x.norm(), 1e-10);
    EXPECT_EQ(f.solve(Vector(Vector::Zero(a.rows()))), Vector(Vector::Zero(a.rows())));
    EXPECT_THROW((void)f.solve(Vector(Vector::Zero(3))), InvalidArgument);
}

TEST(Cholesky, MultiRhsMatchesColumnSolvesBitwise) {
    const auto sys = fixture::bar_system(4, 64);
    ASSERT_EQ(sys.n(), 63);
    const CholeskyFactor f(sys.K);
    CounterRng rng(21);
    Matrix b(63, 100);
    for (Index j = 0; j < 100; ++j) b.col(j) = gaussian_vector(rng, 63);
    const Matrix x = f.solve(b);
    for (Index j = 0; j < 100; ++j) EXPECT_EQ(Vector(x.col(j)), f.solve(Vector(b.col(j))));
}

TEST(Cholesky, FactorReuseMatchesRefactorization) {
    const SparseMatrix a = grid_spd(7, 2);
    const CholeskyFactor f(a);
    CounterRng rng(4);
    for (int k = 0; k < 100; ++k) {
        const Vector b = gaussian_vector(rng, a.rows());
        const CholeskyFactor g(a);
        EXPECT_LT((f.solve(b) - g.solve(b)).norm(), 1e-12 * std::max(1.0, b.norm()));
    }
}

TEST(Cholesky, SolutionIndependentOfOrdering) {
    const SparseMatrix a = grid_spd(9, 8);
    CounterRng rng(6);
    const Vector b = gaussian_vector(rng, a.rows());
    const Vector x1 = CholeskyFactor(a, Ordering::Natural).solve(b);
    const Vector x2 = CholeskyFactor(a, Ordering::ReverseCuthillMcKee).solve(b);
    EXPECT_LT((x1 - x2).norm() / x1.norm(), 1e-10);
}

TEST(Cholesky, RcmIsPermutationAndReducesBandwidth) {
    // Scramble a banded matrix, then check RCM restores a small bandwidth.
    const SparseMatrix band = grid_spd(10, 3);
    std::vector<Index> shuffle(100);
    std::iota(shuffle.begin(), shuffle.end(), Index{0});
    CounterRng rng(17);
    for (Index i = 99; i > 0; --i) std::swap(shuffle[i], shuffle[rng.next_u64() % static_cast<std::uint64_t>(i + 1)]);
    std::vector<Triplet> t;
    for (const auto& e : band.triplets()) t.push_back({shuffle[e.row], shuffle[e.col], e.value});
    const auto a = SparseMatrix::from_triplets(100, 100, t);
    auto perm = reverse_cuthill_mckee(a);
    std::vector<Index> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (Index k = 0; k < 100; ++k) EXPECT_EQ(sorted[k], k);
    std::vector<Index> inv(100);
    for (Index k = 0; k < 100; ++k) inv[perm[k]] = k;
    Index bw = 0;
    for (const auto& e : a.triplets()) bw = std::max(bw, std::abs(inv[e.row] - inv[e.col]));
    EXPECT_LE(bw, 12);
    EXPECT_EQ(reverse_cuthill_mckee(a), perm);
}

TEST(SymEig, DiagonalGivesSignedPermutation) {
    Matrix a = Matrix::Zero(3, 3);
    a.diagonal() << 3, 1, 2;
    const auto r = sym_eig(a);
    EXPECT_EQ(r.values, Vector((Vector(3) << 3, 2, 1).finished()));
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 0) = expected(2, 1) = expected(1, 2) = 1.0;
    EXPECT_LT((r.vectors - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SymEig, RankOne) {
    const Vector v = (Vector(4) << 1, -2, 0.5, 3).finished();
    const auto r = sym_eig(v * v.transpose());
    EXPECT_NEAR(r.values[0], v.squaredNorm(), 1e-12);
    for (Index k = 1; k < 4; ++k) EXPECT_NEAR(r.values[k], 0.0, 1e-12);
    // largest-magnitude entry positive fixes the sign to +v
    EXPECT_LT((r.vectors.col(0) - v / v.norm()).norm(), 1e-12);
}

TEST(SymEig, AgreesWithJacobiOracle) {
    CounterRng rng(31);
    Matrix g(40, 40);
    for (Index j = 0; j < 40; ++j) g.col(j) = gaussian_vector(rng, 40);
    const Matrix a = g + g.transpose();
    const auto r = sym_eig(a);
    auto [lam, q] = oracle::jacobi_eig(a);
    std::sort(lam.data(), lam.data() + lam.size(), std::greater<>());
    EXPECT_LT((r.values - lam).cwiseAbs().maxCoeff(), 1e-10 * a.norm());
    EXPECT_LT((r.vectors * r.values.asDiagonal() * r.vectors.transpose() - a).norm(), 1e-8 * a.norm());
    EXPECT_LT((r.vectors.transpose() * r.vectors - Matrix::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-10);
    for (Index k = 1; k < 40; ++k) EXPECT_GE(r.values[k - 1], r.values[k]);
}

TEST(SymEig, CapAndSymmetryErrors) {
    EXPECT_THROW((void)sym_eig(Matrix::Identity(10, 10), 9), CapacityError);
    Matrix a = Matrix::Identity(3, 3);
    a(0, 1) = 1.0;
    EXPECT_THROW((void)sym_eig(a), InvalidArgument);
}

TEST(Random, FixedSeedReproducesStream) {
    CounterRng a(42), b(42);
    EXPECT_EQ(gaussian_vector(a, 1000), gaussian_vector(b, 1000));
    auto s1 = CounterRng::split(42, 3), s2 = CounterRng::split(42, 3);
    EXPECT_EQ(gaussian_vector(s1, 50), gaussian_vector(s2, 50));
}

TEST(Random, DistinctSeedsAndStreamsDiffer) {
    CounterRng a(1), b(2);
    const Vector x = gaussian_vector(a, 10), y = gaussian_vector(b, 10);
    for (Index k = 0; k < 10; ++k) EXPECT_NE(x[k], y[k]);
    auto s = CounterRng::split(1, 0), t = CounterRng::split(1, 1);
    EXPECT_NE(gaussian_vector(s, 10), gaussian_vector(t, 10));
}

TEST(Random, MillionDrawMoments) {
    CounterRng rng(2024);
    const Index n = 1000000;
    const Vector z = gaussian_vector(rng, n);
    const double mean = z.mean();
    const double var = (z.array() - mean).square().sum() / static_cast<double>(n - 1);
    EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(static_cast<double>(n)));
    EXPECT_GE(var, 0.99);
    EXPECT_LE(var, 1.01);
    // 5 sigma band of the variance estimator: sqrt(2/n)
    EXPECT_LT(std::abs(var - 1.0), 5.0 * std::sqrt(2.0 / static_cast<double>(n)));
}
