#include "jcs/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace jcs {

namespace {

const ParamLayout& require_layout(const Chain& chain) {
  if (chain.size() == 0) throw ValidationError("chain is empty");
  if (!chain.layout) throw ValidationError("chain has no parameter layout");
  if (chain.layout->dim() != chain.dim()) throw ValidationError("chain columns do not match its layout");
  return *chain.layout;
}

std::string reporting_name(const ParamLayout& lay, Index k) {
  auto idx = [](Index v) { return std::to_string(v + 1); };
  if (k < lay.nu_offset()) return "phi_" + idx(k);
  if (k < lay.beta1_offset()) return "nu_" + idx(k - lay.nu_offset());
  if (k < lay.beta2_offset()) return "beta1_" + idx(k - lay.beta1_offset());
  if (k < lay.psi_offset()) return "beta2_" + idx(k - lay.beta2_offset());
  return "psi";
}

}  // namespace

BayesEstimates bayes_estimates(const Chain& chain) {
  const ParamLayout& lay = require_layout(chain);
  const Matrix& d = chain.draws;
  BayesEstimates out;
  out.phi_hat = d.middleCols(lay.phi_offset(), lay.n_prime).array().exp().colwise().mean().transpose();
  out.nu_hat = d.middleCols(lay.nu_offset(), lay.n_prime).colwise().mean().transpose();
  out.beta1_hat = d.middleCols(lay.beta1_offset(), lay.p).colwise().mean().transpose();
  out.beta2_hat = d.middleCols(lay.beta2_offset(), lay.q).colwise().mean().transpose();
  out.psi_hat = d.col(lay.psi_offset()).array().exp().mean();
  return out;
}

double BaselineFit::lambda10(double t) const {
  return estimates.phi_hat.dot(delta_increments(t, estimates.grid));
}

double BaselineFit::lambda20(double t) const {
  return eval_lambda20(estimates.nu_hat, estimates.grid, t);
}

BaselineFit baseline_estimates(const Chain& chain, const Vector& grid) {
  const ParamLayout& lay = require_layout(chain);
  if (grid.size() != lay.n_prime) throw ValidationError("grid size does not match chain layout");
  const BayesEstimates est = bayes_estimates(chain);
  return BaselineFit{BaselineEstimates{grid, est.phi_hat, est.nu_hat}};
}

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ValidationError("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double pos = n * prob + 0.5;  // 1-based position
  if (pos <= 1.0) return values.front();
  if (pos >= n) return values.back();
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

std::pair<double, double> credible_interval(const Vector& column_draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("credible_interval: level must lie in (0, 1)");
  if (column_draws.size() < 1) throw ValidationError("credible_interval: no draws");
  std::vector<double> v(column_draws.data(), column_draws.data() + column_draws.size());
  const double tail = 0.5 * (1.0 - level);
  return {empirical_quantile(v, tail), empirical_quantile(v, 1.0 - tail)};
}

const ParameterSummary& FitSummary::find(const std::string& name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p;
  throw ValidationError("no parameter named " + name + " in summary");
}

Matrix reporting_scale(const Chain& chain) {
  const ParamLayout& lay = require_layout(chain);
  Matrix out = chain.draws;
  out.middleCols(lay.phi_offset(), lay.n_prime) = out.middleCols(lay.phi_offset(), lay.n_prime).array().exp();
  out.col(lay.psi_offset()) = out.col(lay.psi_offset()).array().exp();
  return out;
}

FitSummary summarize(const Chain& chain, const Dataset& data, double level) {
  const ParamLayout& lay = require_layout(chain);
  if (!(lay == ParamLayout::of(data))) throw ValidationError("chain dimensions do not match the dataset");

  const Matrix draws = reporting_scale(chain);
  FitSummary out;
  out.s0 = chain.size();
  out.level = level;
  out.parameters.reserve(static_cast<std::size_t>(lay.dim()));
  for (Index k = 0; k < lay.dim(); ++k) {
    const Vector col = draws.col(k);
    ParameterSummary ps;
    ps.name = reporting_name(lay, k);
    ps.estimate = col.minCoeff() == col.maxCoeff() ? col(0) : col.mean();
    const double ss = (col.array() - ps.estimate).square().sum();
    ps.psd = col.size() > 1 ? std::sqrt(ss / static_cast<double>(col.size() - 1)) : 0.0;
    std::tie(ps.lower, ps.upper) = credible_interval(col, level);
    out.parameters.push_back(std::move(ps));
  }
  const BayesEstimates est = bayes_estimates(chain);
  out.baseline = BaselineEstimates{data.grid(), est.phi_hat, est.nu_hat};
  return out;
}

}  // namespace jcs
