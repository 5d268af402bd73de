#ifndef JCS_PRIORS_HPP
#define JCS_PRIORS_HPP

#include "jcs/model.hpp"

#include <Eigen/Cholesky>

namespace jcs {

/// Multivariate normal block with its Cholesky factor and log normalizing constant.
class GaussianBlock {
 public:
  GaussianBlock() = default;
  GaussianBlock(Vector mean, Matrix cov, const char* name);

  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }
  Index size() const noexcept { return mean_.size(); }

  template <typename Derived>
  double log_density(const Eigen::MatrixBase<Derived>& x) const {
    if (mean_.size() == 0) return 0.0;
    const Vector z = chol_.matrixL().solve((x - mean_).eval());
    return log_norm_ - 0.5 * z.squaredNorm();
  }

 private:
  Vector mean_;
  Matrix cov_;
  Eigen::LLT<Matrix> chol_;
  double log_norm_ = 0.0;
};

/// Independent normal priors on phi*, nu, beta1, beta2 and psi*. The phi*,
/// beta1 and beta2 blocks are diagonal; nu may carry a dense covariance.
/// Cholesky factors are computed here, so a singular covariance fails at
/// construction rather than at evaluation.
class PriorSpec {
 public:
  PriorSpec(const Vector& phi_star_mean, const Vector& phi_star_var, const Vector& nu_mean,
            const Matrix& nu_cov, const Vector& beta1_mean, const Vector& beta1_var,
            const Vector& beta2_mean, const Vector& beta2_var, double psi_star_mean,
            double psi_star_var);

  /// N(0, 10^2) on every scalar component, independent.
  static PriorSpec vague(const ParamLayout& layout);

  const GaussianBlock& phi_star() const noexcept { return phi_star_; }
  const GaussianBlock& nu() const noexcept { return nu_; }
  const GaussianBlock& beta1() const noexcept { return beta1_; }
  const GaussianBlock& beta2() const noexcept { return beta2_; }
  const GaussianBlock& psi_star() const noexcept { return psi_star_; }

  ParamLayout layout() const { return {phi_star_.size(), beta1_.size(), beta2_.size()}; }
  ParamVector mean() const;
  /// Block-diagonal prior covariance over the flat parameter vector.
  Matrix covariance() const;

  /// Throws ValidationError when n', p or q disagree with the dataset.
  void check_compatible(const Dataset& data) const;

 private:
  GaussianBlock phi_star_;
  GaussianBlock nu_;
  GaussianBlock beta1_;
  GaussianBlock beta2_;
  GaussianBlock psi_star_;
};

/// AR(1) correlation matrix, entry (i, j) = rho^|i-j|.
Matrix ar1_correlation(Index n_prime, double rho);

/// D^{1/2} R(rho) D^{1/2} for per-component variances D.
Matrix ar1_covariance(const Vector& variances, double rho);

/// Sum of the five normal log densities, normalizing constants included.
double log_prior(const ParamVector& theta, const PriorSpec& spec);

/// Unnormalized log posterior: log_likelihood + log_prior.
double log_posterior(const ParamVector& theta, const Dataset& data, const PriorSpec& spec);

}  // namespace jcs

#endif  // JCS_PRIORS_HPP
