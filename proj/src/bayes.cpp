#include "bfem/bayes.hpp"

#include "bfem/error.hpp"

#include <cmath>

namespace bfem {

namespace {

void check_cap(Index n, Index cap) {
    if (n > cap) throw CapacityError(n, cap);
}

bool is_empty(const SparseMatrix& a) { return a.rows() == 0 || a.nnz() == 0; }

}  // namespace

double PriorSpec::noise_std() const {
    if (sigma_e) return *sigma_e;
    return is_greens() ? 0.0 : kWhiteNoiseSigmaE;
}

void PriorSpec::validate() const {
    if (const auto* w = std::get_if<WhiteNoise>(&kind); w && !(w->alpha > 0.0))
        throw InvalidArgument("prior: alpha must be positive");
    if (!(noise_std() >= 0.0)) throw InvalidArgument("prior: sigma_e must be non-negative");
}

SparseMatrix prior_covariance_f(const PriorSpec& prior, const SparseMatrix& K, const SparseMatrix& M) {
    prior.validate();
    if (prior.is_greens()) return K;
    const double a = std::get<WhiteNoise>(prior.kind).alpha;
    return a == 1.0 ? M : M.scaled(a * a);
}

PosteriorMoments::PosteriorMoments(const AssembledSystem& system, ForcePrior prior, const Vector& observation)
    : K_(system.K), Phi_(system.Phi), prior_(std::move(prior)), y_(observation) {
    const Index n = K_.rows();
    if (prior_.Sigma_f.rows() != n || prior_.Sigma_f.cols() != n)
        throw InvalidArgument("posterior: Sigma_f does not match K");
    if (prior_.mean.size() != 0 && prior_.mean.size() != n) throw InvalidArgument("posterior: prior mean size");
    if (y_.size() != Phi_.cols()) throw InvalidArgument("posterior: observation size does not match Phi");
    if (!(prior_.sigma_e >= 0.0)) throw InvalidArgument("posterior: sigma_e must be non-negative");

    K_factor_ = std::make_shared<const CholeskyFactor>(K_);
    SparseMatrix S = triple_product(Phi_, prior_.Sigma_f);
    if (prior_.sigma_e > 0.0)
        S = add(S, SparseMatrix::identity(S.rows()), 1.0, prior_.sigma_e * prior_.sigma_e);
    S_factor_ = std::make_shared<const CholeskyFactor>(S);

    const bool has_mean = prior_.mean.size() != 0;
    Vector innovation = y_;
    if (has_mean) innovation -= Phi_.transpose_times(prior_.mean);
    const Vector c = S_factor_->solve(innovation);
    if (prior_.equals_stiffness) {
        mean_ = Phi_ * c;
        if (has_mean) mean_ += K_factor_->solve(prior_.mean);
    } else {
        Vector rhs = prior_.Sigma_f * Vector(Phi_ * c);
        if (has_mean) rhs += prior_.mean;
        mean_ = K_factor_->solve(rhs);
    }
}

Vector PosteriorMoments::cov_action(const Vector& v) const {
    if (v.size() != size()) throw InvalidArgument("cov_action: dimension mismatch");
    if (prior_.equals_stiffness) {
        Vector out = K_factor_->solve(v);
        out -= Phi_ * S_factor_->solve(Phi_.transpose_times(v));
        return out;
    }
    const Vector t = prior_.Sigma_f * K_factor_->solve(v);
    const Vector r = t - prior_.Sigma_f * Vector(Phi_ * S_factor_->solve(Phi_.transpose_times(t)));
    return K_factor_->solve(r);
}

Vector PosteriorMoments::prior_cov_action(const Vector& v) const {
    if (v.size() != size()) throw InvalidArgument("prior_cov_action: dimension mismatch");
    if (prior_.equals_stiffness) return K_factor_->solve(v);
    return K_factor_->solve(Vector(prior_.Sigma_f * K_factor_->solve(v)));
}

namespace {

template <class Action>
Matrix materialize(Index n, Index cap, Action&& action) {
    check_cap(n, cap);
    Matrix a(n, n);
    Vector unit = Vector::Zero(n);
    for (Index k = 0; k < n; ++k) {
        unit[k] = 1.0;
        a.col(k) = action(unit);
        unit[k] = 0.0;
    }
    return 0.5 * (a + a.transpose());
}

}  // namespace

Matrix PosteriorMoments::dense_covariance(Index cap) const {
    return materialize(size(), cap, [this](const Vector& v) { return cov_action(v); });
}

Matrix PosteriorMoments::dense_prior_covariance(Index cap) const {
    return materialize(size(), cap, [this](const Vector& v) { return prior_cov_action(v); });
}

Vector PosteriorMoments::variance() const {
    const Index n = size();
    Vector var(n);
    Vector unit = Vector::Zero(n);
    for (Index k = 0; k < n; ++k) {
        unit[k] = 1.0;
        var[k] = cov_action(unit)[k];
        unit[k] = 0.0;
    }
    return var;
}

Vector PosteriorMoments::std_dev() const { return variance().cwiseMax(0.0).cwiseSqrt(); }

PosteriorMoments posterior_moments(const PriorSpec& prior, const AssembledSystem& system) {
    ForcePrior fp{prior_covariance_f(prior, system.K, system.M), Vector(), prior.is_greens(), prior.noise_std()};
    return PosteriorMoments(system, std::move(fp), system.g);
}

Vector f_hat_projection(const SparseMatrix& M, const SparseMatrix& Phi, const Vector& f, double sigma_e) {
    if (M.rows() != Phi.rows() || f.size() != Phi.rows()) throw InvalidArgument("f_hat_projection: shape mismatch");
    if (!(sigma_e >= 0.0)) throw InvalidArgument("f_hat_projection: sigma_e must be non-negative");
    SparseMatrix S = triple_product(Phi, M);
    if (sigma_e > 0.0) S = add(S, SparseMatrix::identity(S.rows()), 1.0, sigma_e * sigma_e);
    const CholeskyFactor fac(S);
    return M * Vector(Phi * fac.solve(Phi.transpose_times(f)));
}

Vector discretization_error(const AssembledSystem& system, const Vector& f) {
    if (f.size() != system.n()) throw InvalidArgument("discretization_error: load size");
    const CholeskyFactor fine(system.K);
    const CholeskyFactor coarse(system.Kc);
    return fine.solve(f) - system.Phi * coarse.solve(system.Phi.transpose_times(f));
}

Vector discretization_error(const AssembledSystem& system) { return discretization_error(system, system.f); }

Vector error_recovery(const PosteriorMoments& post, const Vector& f) {
    if (!post.prior().equals_stiffness || post.prior().sigma_e != 0.0)
        throw Unsupported("error_recovery: needs the Green's prior with sigma_e = 0");
    return post.cov_action(f);
}

double contraction_check(const PosteriorMoments& post, const AssembledSystem& system, Index cap) {
    check_cap(post.size(), cap);
    const Matrix sigma_star = post.dense_covariance(cap);
    const CholeskyFactor& kf = post.stiffness_factor();
    const Vector u_hat = kf.solve(system.f);
    const Vector ku = system.K * u_hat;
    // Sigma^{-1} = K Sigma_f^{-1} K
    Vector w;
    if (post.prior().equals_stiffness) {
        w = ku;
    } else {
        const CholeskyFactor sf(post.prior().Sigma_f);
        w = system.K * sf.solve(ku);
    }
    const Vector lhs = sigma_star * w;
    const double scale = u_hat.norm();
    const double res = (lhs - (u_hat - post.mean())).norm();
    return scale > 0.0 ? res / scale : res;
}

Matrix RescaledCovariance::matrix() const { return Q * E.asDiagonal() * Q.transpose(); }

Vector RescaledCovariance::diagonal() const { return Q.cwiseAbs2() * E; }

RescaledCovariance rescale_eigenvalues(const Matrix& sigma_star, const Vector& f, Index cap) {
    if (f.size() != sigma_star.rows()) throw InvalidArgument("rescale_eigenvalues: load size");
    auto eig = sym_eig(sigma_star, cap);
    RescaledCovariance r;
    r.f_tilde = eig.vectors.transpose() * f;
    r.e_tilde = eig.values.cwiseProduct(r.f_tilde);
    r.E = r.e_tilde.cwiseAbs();
    r.Q = std::move(eig.vectors);
    r.lambda = std::move(eig.values);
    return r;
}

BoundaryForceMoments boundary_prior_moments(const BoundaryPrior& bp, const SparseMatrix& K_id,
                                            const SparseMatrix& Sigma_f) {
    const Index ni = Sigma_f.rows();
    const Index nd = K_id.cols();
    if (K_id.rows() != ni) throw InvalidArgument("boundary_prior_moments: K_id rows do not match Sigma_f");
    if (bp.m_d.size() != 0 && bp.m_d.size() != nd) throw InvalidArgument("boundary_prior_moments: m_d size");
    if (bp.m_n.size() != 0 && bp.m_n.size() != ni) throw InvalidArgument("boundary_prior_moments: m_n size");
    if (!is_empty(bp.Sigma_d) && (bp.Sigma_d.rows() != nd || bp.Sigma_d.cols() != nd))
        throw InvalidArgument("boundary_prior_moments: Sigma_d shape");
    if (!is_empty(bp.Sigma_n) && (bp.Sigma_n.rows() != ni || bp.Sigma_n.cols() != ni))
        throw InvalidArgument("boundary_prior_moments: Sigma_n shape");

    BoundaryForceMoments out{Vector::Zero(ni), Sigma_f};
    if (bp.m_d.size() != 0) out.mean -= K_id * bp.m_d;
    if (bp.m_n.size() != 0) out.mean += bp.m_n;
    if (!is_empty(bp.Sigma_d))
        out.cov = add(out.cov, triple_product(K_id.transpose(), bp.Sigma_d), 1.0, bp.beta * bp.beta);
    if (!is_empty(bp.Sigma_n)) out.cov = add(out.cov, bp.Sigma_n, 1.0, bp.gamma * bp.gamma);
    return out;
}

Vector inhomogeneous_observation(const AssembledSystem& system, const Vector& u_d, const Vector& f_n) {
    if (u_d.size() != system.K_id.cols()) throw InvalidArgument("inhomogeneous_observation: u_d size");
    if (f_n.size() != 0 && f_n.size() != system.n()) throw InvalidArgument("inhomogeneous_observation: f_n size");
    Vector rhs = system.f - system.K_id * u_d;
    if (f_n.size() != 0) rhs += f_n;
    return system.Phi.transpose_times(rhs);
}

PosteriorMoments boundary_posterior(const PriorSpec& prior, const AssembledSystem& system, const BoundaryPrior& bp,
                                    const Vector& u_d, const Vector& f_n) {
    auto moments = boundary_prior_moments(bp, system.K_id, prior_covariance_f(prior, system.K, system.M));
    const bool extra_cov = !is_empty(bp.Sigma_d) || !is_empty(bp.Sigma_n);
    ForcePrior fp{std::move(moments.cov), Vector(), prior.is_greens() && !extra_cov, prior.noise_std()};
    if (!moments.mean.isZero(0.0)) fp.mean = std::move(moments.mean);
    return PosteriorMoments(system, std::move(fp), inhomogeneous_observation(system, u_d, f_n));
}

}  // namespace bfem
