#pragma once

#include "bfem/bayes.hpp"
#include "bfem/random.hpp"

#include <cstdint>
#include <string_view>

namespace bfem {

enum class EnsembleKind { Prior, PosteriorViaF, PosteriorViaU };

std::string_view to_string(EnsembleKind kind);

/// N samples of the interior displacement as columns.
struct Ensemble {
    Matrix X;
    std::uint64_t seed = 0;
    EnsembleKind kind = EnsembleKind::Prior;

    [[nodiscard]] Index size() const noexcept { return X.cols(); }
};

/// Sample mean and residual matrix F = X - mean 1^T; the sample covariance
/// F F^T / (N - 1) is only formed on request.
struct SampleStats {
    Vector mean;
    Matrix residual;

    [[nodiscard]] Index count() const noexcept { return residual.cols(); }
    [[nodiscard]] Vector variance() const;
    [[nodiscard]] Matrix covariance(Index cap = kDefaultDenseCap) const;
};

SampleStats ensemble_stats(const Ensemble& ensemble);

struct SamplingOptions {
    /// Draw forces from N(0, diag(Sigma_f)) instead of the exact prior.
    bool diagonal_sigma_f = false;
};

/// Forces from the prior (mean included), pushed through K^{-1}.
/// Column j draws from stream split(seed, j); observation noise for column j
/// from split(seed, N + j).
Ensemble sample_prior(const PosteriorMoments& post, Index N, std::uint64_t seed, const SamplingOptions& opts = {});

/// Perturbed-observation update in force space, one fine solve per sample.
Ensemble sample_posterior_via_f(const PosteriorMoments& post, Index N, std::uint64_t seed,
                                const SamplingOptions& opts = {});

/// Same update in displacement space, two fine solves per sample.
Ensemble sample_posterior_via_u(const PosteriorMoments& post, Index N, std::uint64_t seed,
                                const SamplingOptions& opts = {});

/// Relative max-norm gap between the Joseph-form force covariance
/// (I - G Phi^T) Sigma_f (I - G Phi^T)^T + sigma_e^2 G G^T and the
/// conventional (I - G Phi^T) Sigma_f, evaluated densely.
double joseph_form_residual(const PosteriorMoments& post, Index cap = kDefaultDenseCap);

}  // namespace bfem
