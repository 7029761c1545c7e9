#pragma once

#include "bfem/assembly.hpp"
#include "bfem/cholesky.hpp"
#include "bfem/dense_eigen.hpp"

#include <memory>
#include <optional>
#include <variant>

namespace bfem {

/// Sigma_f = alpha^2 M.
struct WhiteNoise {
    double alpha = 1.0;
};

/// Sigma_f = K, i.e. prior covariance K^{-1} on the solution.
struct GreensFunction {};

inline constexpr double kWhiteNoiseSigmaE = 1e-6;

struct PriorSpec {
    std::variant<WhiteNoise, GreensFunction> kind = GreensFunction{};
    std::optional<double> sigma_e;  ///< unset: 1e-6 for white noise, 0 for Green's

    static PriorSpec white_noise(double alpha = 1.0, std::optional<double> sigma_e = {}) {
        return {WhiteNoise{alpha}, sigma_e};
    }
    static PriorSpec greens(std::optional<double> sigma_e = {}) { return {GreensFunction{}, sigma_e}; }

    [[nodiscard]] bool is_greens() const noexcept { return std::holds_alternative<GreensFunction>(kind); }
    [[nodiscard]] double noise_std() const;
    void validate() const;
};

SparseMatrix prior_covariance_f(const PriorSpec& prior, const SparseMatrix& K, const SparseMatrix& M);

/// Gaussian prior on the (effective) interior force vector together with the
/// coarse observation y = Phi^T f_eff + noise.
struct ForcePrior {
    SparseMatrix Sigma_f;
    Vector mean;                  ///< empty means zero
    bool equals_stiffness = false;  ///< Sigma_f == K exactly; enables the Green's shortcuts
    double sigma_e = 0.0;
};

/// Posterior over the interior fine displacement given the coarse
/// observations. Covariances are available as actions built from sparse
/// solves; dense forms only on request and under a cap. Immutable.
class PosteriorMoments {
public:
    PosteriorMoments(const AssembledSystem& system, ForcePrior prior, const Vector& observation);

    [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
    [[nodiscard]] Index size() const noexcept { return K_.rows(); }

    /// v -> Sigma* v.
    [[nodiscard]] Vector cov_action(const Vector& v) const;
    /// v -> Sigma v with Sigma = K^{-1} Sigma_f K^{-1}.
    [[nodiscard]] Vector prior_cov_action(const Vector& v) const;

    [[nodiscard]] Matrix dense_covariance(Index cap = kDefaultDenseCap) const;
    [[nodiscard]] Matrix dense_prior_covariance(Index cap = kDefaultDenseCap) const;

    /// diag(Sigma*) from one action per unit vector (no dense storage).
    [[nodiscard]] Vector variance() const;
    [[nodiscard]] Vector std_dev() const;

    [[nodiscard]] const ForcePrior& prior() const noexcept { return prior_; }
    [[nodiscard]] const SparseMatrix& stiffness() const noexcept { return K_; }
    [[nodiscard]] const SparseMatrix& prolongation() const noexcept { return Phi_; }
    [[nodiscard]] const Vector& observation() const noexcept { return y_; }
    [[nodiscard]] const CholeskyFactor& stiffness_factor() const noexcept { return *K_factor_; }
    /// Factor of S = Phi^T Sigma_f Phi + sigma_e^2 I.
    [[nodiscard]] const CholeskyFactor& gain_factor() const noexcept { return *S_factor_; }

private:
    SparseMatrix K_;
    SparseMatrix Phi_;
    ForcePrior prior_;
    Vector y_;
    std::shared_ptr<const CholeskyFactor> K_factor_;
    std::shared_ptr<const CholeskyFactor> S_factor_;
    Vector mean_;
};

PosteriorMoments posterior_moments(const PriorSpec& prior, const AssembledSystem& system);

/// M Phi (Phi^T M Phi + sigma_e^2 I)^{-1} Phi^T f.
Vector f_hat_projection(const SparseMatrix& M, const SparseMatrix& Phi, const Vector& f, double sigma_e);

/// K^{-1} f - Phi Kc^{-1} g.
Vector discretization_error(const AssembledSystem& system);
/// Same for another load on the same system.
Vector discretization_error(const AssembledSystem& system, const Vector& f);

/// Sigma* f. Requires a Green's posterior without observation noise.
Vector error_recovery(const PosteriorMoments& post, const Vector& f);

/// ||Sigma* Sigma^{-1} u_hat - (u_hat - m*)|| / ||u_hat|| using the dense
/// posterior covariance; u_hat = K^{-1} f.
double contraction_check(const PosteriorMoments& post, const AssembledSystem& system, Index cap = kDefaultDenseCap);

/// Sigma* = Q diag(lambda) Q^T rescaled to Q diag(|lambda .* Q^T f|) Q^T.
struct RescaledCovariance {
    Matrix Q;
    Vector lambda;
    Vector f_tilde;
    Vector e_tilde;  ///< lambda .* f_tilde; Q e_tilde = Sigma* f
    Vector E;        ///< |e_tilde|

    [[nodiscard]] Matrix matrix() const;
    /// diag(Q E Q^T) without forming the matrix.
    [[nodiscard]] Vector diagonal() const;
};

RescaledCovariance rescale_eigenvalues(const Matrix& sigma_star, const Vector& f, Index cap = kDefaultDenseCap);

/// Random Dirichlet displacement and Neumann force priors. Empty vectors and
/// matrices stand for zero.
struct BoundaryPrior {
    Vector m_d;
    SparseMatrix Sigma_d;
    double beta = 1.0;
    Vector m_n;  ///< over interior DOFs
    SparseMatrix Sigma_n;
    double gamma = 1.0;
};

struct BoundaryForceMoments {
    Vector mean;
    SparseMatrix cov;
};

/// Mean and covariance of the effective interior force f - K_id u_d + f_n.
BoundaryForceMoments boundary_prior_moments(const BoundaryPrior& bp, const SparseMatrix& K_id,
                                            const SparseMatrix& Sigma_f);

/// Phi^T (f + f_n - K_id u_d).
Vector inhomogeneous_observation(const AssembledSystem& system, const Vector& u_d, const Vector& f_n = {});

/// Posterior with boundary priors; y from inhomogeneous_observation.
PosteriorMoments boundary_posterior(const PriorSpec& prior, const AssembledSystem& system, const BoundaryPrior& bp,
                                    const Vector& u_d, const Vector& f_n = {});

}  // namespace bfem
