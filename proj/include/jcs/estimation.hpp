#ifndef JCS_ESTIMATION_HPP
#define JCS_ESTIMATION_HPP

#include "jcs/model.hpp"
#include "jcs/sampler.hpp"

#include <string>
#include <utility>
#include <vector>

namespace jcs {

/// Posterior-mean (squared-error Bayes) estimates. phi_hat and psi_hat are
/// means of the exponentiated draws, not exponentials of means.
struct BayesEstimates {
  Vector phi_hat;
  Vector nu_hat;
  Vector beta1_hat;
  Vector beta2_hat;
  double psi_hat = 0.0;
};

BayesEstimates bayes_estimates(const Chain& chain);

/// Estimated baselines with their evaluators.
struct BaselineFit {
  BaselineEstimates estimates;

  /// Piecewise linear with slopes phi_hat.
  double lambda10(double t) const;
  /// Step function with jumps exp(nu_hat) at the grid points.
  double lambda20(double t) const;
};

BaselineFit baseline_estimates(const Chain& chain, const Vector& grid);

/// Empirical quantile with linear interpolation between order statistics at
/// plotting positions (k - 0.5) / n, clamped to the sample range.
double empirical_quantile(std::vector<double> sorted_or_not, double prob);

/// Equal-tailed credible interval at `level`.
std::pair<double, double> credible_interval(const Vector& column_draws, double level = 0.95);

struct ParameterSummary {
  std::string name;  // reporting-scale name: phi_d, nu_d, beta1_j, beta2_j, psi
  double estimate = 0.0;
  double psd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct FitSummary {
  std::vector<ParameterSummary> parameters;
  BaselineEstimates baseline;
  Index s0 = 0;
  double level = 0.95;

  const ParameterSummary& find(const std::string& name) const;
};

/// Reporting-scale draws: exp for phi* and psi*, identity elsewhere.
Matrix reporting_scale(const Chain& chain);

FitSummary summarize(const Chain& chain, const Dataset& data, double level = 0.95);

}  // namespace jcs

#endif  // JCS_ESTIMATION_HPP
