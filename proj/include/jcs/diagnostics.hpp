#ifndef JCS_DIAGNOSTICS_HPP
#define JCS_DIAGNOSTICS_HPP

#include "jcs/model.hpp"
#include "jcs/sampler.hpp"

#include <string>
#include <vector>

namespace jcs {

/// Threshold above which a subject is flagged as influential.
inline constexpr double kInfluenceThreshold = 0.223;

/// -2 x log-likelihood.
double deviance(const ParamVector& theta, const Dataset& data);

struct DicResult {
  double dic = 0.0;
  double p_d = 0.0;
  double dev_bar = 0.0;
  double dev_at_mean = 0.0;
  std::vector<std::string> warnings;
};

/// dev_bar averages the deviance over draws; dev_at_mean plugs in the
/// working-scale posterior mean (means of phi*, nu, beta, psi*).
DicResult dic(const Chain& chain, const Dataset& data);

/// Per-draw, per-subject log-likelihood terms (s0 x n).
Matrix pointwise_log_likelihood(const Chain& chain, const Dataset& data);

/// log CPO_i = -log( mean_s exp(-ll(s, i)) ), evaluated with log-sum-exp.
Vector log_cpo(const Matrix& pointwise);

/// KL case-deletion estimate: -log CPO_i + mean_s ll(s, i).
Vector kl_from_pointwise(const Matrix& pointwise, const Vector& log_cpo_values);

/// Harmonic-mean CPO per subject. Throws NumericError naming the subject if
/// its CPO underflows.
Vector cpo(const Chain& chain, const Dataset& data);

double lpml(const Vector& cpo_values);

struct KlResult {
  Vector kl;
  std::vector<bool> influential;
};

KlResult kl_influence(const Chain& chain, const Dataset& data, const Vector& cpo_values);

struct InfluenceReport {
  Vector cpo;
  Vector log_cpo;
  double lpml = 0.0;
  Vector kl;
  std::vector<bool> influential;
  double dic = 0.0;
  double p_d = 0.0;
  double dev_bar = 0.0;
  double dev_at_mean = 0.0;
  std::vector<std::string> warnings;

  std::size_t influential_count() const;
};

/// DIC, CPO, LPML and KL influence from one pass over the chain.
InfluenceReport influence_report(const Chain& chain, const Dataset& data);

/// Potential scale reduction factor per column. Needs >= 2 chains of equal length.
Vector gelman_rubin(const std::vector<Matrix>& chains);
Vector gelman_rubin(const std::vector<Chain>& chains);

struct EssAcf {
  double ess = 0.0;
  Vector acf;  // lags 0..max_lag
  bool zero_variance = false;
};

/// Autocorrelations up to max_lag and ESS = s0 / (1 + 2 sum rho_k), the sum
/// truncated by the initial positive sequence rule.
EssAcf ess_and_acf(const Vector& column_draws, Index max_lag);

struct ConvergenceRow {
  std::string label;
  double psrf = 0.0;  // NaN with a single chain
  double ess = 0.0;   // summed over chains
  Vector acf;         // first chain
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<double> acceptance_rates;
  std::vector<std::string> warnings;
};

ConvergenceReport convergence_report(const std::vector<Chain>& chains, Index max_lag = 40);

}  // namespace jcs

#endif  // JCS_DIAGNOSTICS_HPP
