#include "bfem/sampling.hpp"

#include "bfem/error.hpp"

#include <memory>

namespace bfem {

std::string_view to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Prior: return "prior";
        case EnsembleKind::PosteriorViaF: return "posterior_via_f";
        case EnsembleKind::PosteriorViaU: return "posterior_via_u";
    }
    return "unknown";
}

Vector SampleStats::variance() const {
    if (count() < 2) throw InvalidArgument("sample variance needs at least two samples");
    return residual.rowwise().squaredNorm() / static_cast<double>(count() - 1);
}

Matrix SampleStats::covariance(Index cap) const {
    if (count() < 2) throw InvalidArgument("sample covariance needs at least two samples");
    if (residual.rows() > cap) throw CapacityError(residual.rows(), cap);
    return residual * residual.transpose() / static_cast<double>(count() - 1);
}

SampleStats ensemble_stats(const Ensemble& ensemble) {
    if (ensemble.size() < 1) throw InvalidArgument("ensemble_stats: empty ensemble");
    SampleStats s;
    s.mean = ensemble.X.rowwise().mean();
    s.residual = ensemble.X.colwise() - s.mean;
    return s;
}

namespace {

class ForceSampler {
public:
    ForceSampler(const PosteriorMoments& post, const SamplingOptions& opts) : post_(post) {
        const auto& fp = post.prior();
        if (opts.diagonal_sigma_f) {
            diag_std_ = fp.Sigma_f.diagonal().cwiseMax(0.0).cwiseSqrt();
        } else if (!fp.equals_stiffness) {
            own_ = std::make_unique<CholeskyFactor>(fp.Sigma_f);
        }
    }

    Vector draw(CounterRng& rng) const {
        const Vector z = gaussian_vector(rng, post_.size());
        Vector f;
        if (diag_std_.size() != 0)
            f = diag_std_.cwiseProduct(z);
        else
            f = (own_ ? *own_ : post_.stiffness_factor()).correlate(z);
        if (post_.prior().mean.size() != 0) f += post_.prior().mean;
        return f;
    }

private:
    const PosteriorMoments& post_;
    std::unique_ptr<CholeskyFactor> own_;
    Vector diag_std_;
};

void check_count(Index N) {
    if (N < 1) throw InvalidArgument("sampling: N must be at least 1");
}

Vector noise(const PosteriorMoments& post, std::uint64_t seed, Index N, Index j) {
    const Index m = post.prolongation().cols();
    const double s = post.prior().sigma_e;
    if (s == 0.0) return Vector::Zero(m);
    auto rng = CounterRng::split(seed, static_cast<std::uint64_t>(N + j));
    return s * gaussian_vector(rng, m);
}

// Sigma_f Phi S^{-1} r
Vector force_gain(const PosteriorMoments& post, const Vector& r) {
    return post.prior().Sigma_f * Vector(post.prolongation() * post.gain_factor().solve(r));
}

}  // namespace

Ensemble sample_prior(const PosteriorMoments& post, Index N, std::uint64_t seed, const SamplingOptions& opts) {
    check_count(N);
    const ForceSampler sampler(post, opts);
    Ensemble ens{Matrix(post.size(), N), seed, EnsembleKind::Prior};
    for (Index j = 0; j < N; ++j) {
        auto rng = CounterRng::split(seed, static_cast<std::uint64_t>(j));
        ens.X.col(j) = post.stiffness_factor().solve(sampler.draw(rng));
    }
    return ens;
}

Ensemble sample_posterior_via_f(const PosteriorMoments& post, Index N, std::uint64_t seed,
                                const SamplingOptions& opts) {
    check_count(N);
    const ForceSampler sampler(post, opts);
    const auto& Phi = post.prolongation();
    Ensemble ens{Matrix(post.size(), N), seed, EnsembleKind::PosteriorViaF};
    for (Index j = 0; j < N; ++j) {
        auto rng = CounterRng::split(seed, static_cast<std::uint64_t>(j));
        Vector f = sampler.draw(rng);
        const Vector innovation = post.observation() - Phi.transpose_times(f) + noise(post, seed, N, j);
        f += force_gain(post, innovation);
        ens.X.col(j) = post.stiffness_factor().solve(f);
    }
    return ens;
}

Ensemble sample_posterior_via_u(const PosteriorMoments& post, Index N, std::uint64_t seed,
                                const SamplingOptions& opts) {
    check_count(N);
    const ForceSampler sampler(post, opts);
    const auto& Phi = post.prolongation();
    const auto& kf = post.stiffness_factor();
    Ensemble ens{Matrix(post.size(), N), seed, EnsembleKind::PosteriorViaU};
    for (Index j = 0; j < N; ++j) {
        auto rng = CounterRng::split(seed, static_cast<std::uint64_t>(j));
        Vector u = kf.solve(sampler.draw(rng));
        // H u = Phi^T K u; G r = K^{-1} Sigma_f Phi S^{-1} r
        const Vector innovation =
            post.observation() - Phi.transpose_times(post.stiffness() * u) + noise(post, seed, N, j);
        u += kf.solve(force_gain(post, innovation));
        ens.X.col(j) = u;
    }
    return ens;
}

double joseph_form_residual(const PosteriorMoments& post, Index cap) {
    const Index n = post.size();
    if (n > cap) throw CapacityError(n, cap);
    const Matrix sigma_f = post.prior().Sigma_f.to_dense();
    const Matrix phi = post.prolongation().to_dense();
    const Index m = phi.cols();
    const Matrix s_inv = post.gain_factor().solve(Matrix(Matrix::Identity(m, m)));
    const Matrix G = sigma_f * phi * s_inv;
    const Matrix A = Matrix::Identity(n, n) - G * phi.transpose();
    const double s2 = post.prior().sigma_e * post.prior().sigma_e;
    const Matrix joseph = A * sigma_f * A.transpose() + s2 * G * G.transpose();
    const Matrix plain = A * sigma_f;
    const double scale = plain.cwiseAbs().maxCoeff();
    const double gap = (joseph - plain).cwiseAbs().maxCoeff();
    return scale > 0.0 ? gap / scale : gap;
}

}  // namespace bfem
