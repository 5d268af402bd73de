#include "jcs/priors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace jcs {

namespace {

Matrix diagonal_cov(const Vector& variances, const char* name) {
  if ((variances.array() <= 0.0).any() || !variances.allFinite())
    throw ValidationError(std::string("prior variances for ") + name + " must be positive and finite");
  return variances.asDiagonal();
}

}  // namespace

GaussianBlock::GaussianBlock(Vector mean, Matrix cov, const char* name)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
    throw ValidationError(std::string("prior covariance for ") + name + " has wrong dimensions");
  if (!mean_.allFinite() || !cov_.allFinite())
    throw ValidationError(std::string("prior for ") + name + " must be finite");
  if (!cov_.isApprox(cov_.transpose(), 1e-12))
    throw ValidationError(std::string("prior covariance for ") + name + " is not symmetric");
  if (mean_.size() == 0) return;
  chol_.compute(cov_);
  if (chol_.info() != Eigen::Success || (chol_.matrixLLT().diagonal().array() <= 0.0).any())
    throw NumericError(std::string("prior covariance for ") + name + " is not positive definite", name);
  const double log_det = 2.0 * chol_.matrixLLT().diagonal().array().log().sum();
  log_norm_ = -0.5 * (static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi) + log_det);
}

PriorSpec::PriorSpec(const Vector& phi_star_mean, const Vector& phi_star_var, const Vector& nu_mean,
                     const Matrix& nu_cov, const Vector& beta1_mean, const Vector& beta1_var,
                     const Vector& beta2_mean, const Vector& beta2_var, double psi_star_mean,
                     double psi_star_var)
    : phi_star_(phi_star_mean, diagonal_cov(phi_star_var, "phi_star"), "phi_star"),
      nu_(nu_mean, nu_cov, "nu"),
      beta1_(beta1_mean, diagonal_cov(beta1_var, "beta1"), "beta1"),
      beta2_(beta2_mean, diagonal_cov(beta2_var, "beta2"), "beta2"),
      psi_star_(Vector::Constant(1, psi_star_mean), diagonal_cov(Vector::Constant(1, psi_star_var), "psi_star"),
                "psi_star") {
  if (phi_star_.size() != nu_.size())
    throw ValidationError("phi_star and nu priors must have the same dimension n'");
  if (phi_star_.size() < 1) throw ValidationError("priors need n' >= 1");
}

PriorSpec PriorSpec::vague(const ParamLayout& layout) {
  const auto m = layout.n_prime;
  return PriorSpec(Vector::Zero(m), Vector::Constant(m, 100.0), Vector::Zero(m),
                   100.0 * Matrix::Identity(m, m), Vector::Zero(layout.p), Vector::Constant(layout.p, 100.0),
                   Vector::Zero(layout.q), Vector::Constant(layout.q, 100.0), 0.0, 100.0);
}

ParamVector PriorSpec::mean() const {
  return ParamVector(phi_star_.mean(), nu_.mean(), beta1_.mean(), beta2_.mean(), psi_star_.mean()(0));
}

Matrix PriorSpec::covariance() const {
  const ParamLayout lay = layout();
  Matrix out = Matrix::Zero(lay.dim(), lay.dim());
  out.block(lay.phi_offset(), lay.phi_offset(), lay.n_prime, lay.n_prime) = phi_star_.cov();
  out.block(lay.nu_offset(), lay.nu_offset(), lay.n_prime, lay.n_prime) = nu_.cov();
  out.block(lay.beta1_offset(), lay.beta1_offset(), lay.p, lay.p) = beta1_.cov();
  out.block(lay.beta2_offset(), lay.beta2_offset(), lay.q, lay.q) = beta2_.cov();
  out(lay.psi_offset(), lay.psi_offset()) = psi_star_.cov()(0, 0);
  return out;
}

void PriorSpec::check_compatible(const Dataset& data) const {
  const ParamLayout lay = layout();
  auto mismatch = [](const char* what, Index prior, Index got) {
    throw ValidationError(std::string("prior/dataset mismatch: ") + what + " is " + std::to_string(prior) +
                          " in the prior but " + std::to_string(got) + " in the dataset");
  };
  if (lay.n_prime != data.n_prime()) mismatch("n' (grid size)", lay.n_prime, data.n_prime());
  if (lay.p != data.p()) mismatch("p", lay.p, data.p());
  if (lay.q != data.q()) mismatch("q", lay.q, data.q());
}

Matrix ar1_correlation(Index n_prime, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("ar1_correlation: rho must lie in (0, 1)");
  if (n_prime < 1) throw DomainError("ar1_correlation: dimension must be at least 1");
  Matrix out(n_prime, n_prime);
  for (Index i = 0; i < n_prime; ++i)
    for (Index j = 0; j < n_prime; ++j) out(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  return out;
}

Matrix ar1_covariance(const Vector& variances, double rho) {
  if ((variances.array() <= 0.0).any()) throw DomainError("ar1_covariance: variances must be positive");
  const Vector sd = variances.array().sqrt();
  return sd.asDiagonal() * ar1_correlation(variances.size(), rho) * sd.asDiagonal();
}

double log_prior(const ParamVector& theta, const PriorSpec& spec) {
  if (!(theta.layout() == spec.layout())) throw ValidationError("parameter layout does not match prior");
  return spec.phi_star().log_density(theta.phi_star()) + spec.nu().log_density(theta.nu()) +
         spec.beta1().log_density(theta.beta1()) + spec.beta2().log_density(theta.beta2()) +
         spec.psi_star().log_density(Vector::Constant(1, theta.psi_star()));
}

double log_posterior(const ParamVector& theta, const Dataset& data, const PriorSpec& spec) {
  return log_likelihood(theta, data) + log_prior(theta, spec);
}

}  // namespace jcs
