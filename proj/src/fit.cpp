#include "jcs/fit.hpp"

#include <cmath>
#include <limits>

namespace jcs {

LogTarget make_posterior_target(const Dataset& data, const PriorSpec& prior) {
  prior.check_compatible(data);
  const ParamLayout layout = prior.layout();
  return [&data, &prior, layout](const Vector& flat) -> double {
    if (!flat.allFinite()) return -std::numeric_limits<double>::infinity();
    try {
      return log_posterior(ParamVector(layout, flat), data, prior);
    } catch (const NumericError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
}

ParamVector default_start(const PriorSpec& prior) {
  ParamVector start = prior.mean();
  start.beta1().setZero();
  start.beta2().setZero();
  start.psi_star() = 0.0;
  return start;
}

Chain pool_chains(const std::vector<Chain>& chains) {
  if (chains.empty()) throw ValidationError("pool_chains: no chains");
  Index rows = 0;
  for (const auto& c : chains) {
    if (c.dim() != chains.front().dim()) throw ValidationError("pool_chains: chains differ in dimension");
    rows += c.size();
  }
  Matrix all(rows, chains.front().dim());
  Index at = 0;
  double acc = 0.0;
  for (const auto& c : chains) {
    all.middleRows(at, c.size()) = c.draws;
    at += c.size();
    acc += c.acceptance_rate;
  }
  Chain out = chains.front().with_draws(std::move(all));
  out.acceptance_rate = acc / static_cast<double>(chains.size());
  return out;
}

FitResult fit_model(const Dataset& data, const PriorSpec& prior, const MCMCConfig& config,
                    const FitOptions& options) {
  prior.check_compatible(data);
  config.validate(prior.layout().dim());
  const LogTarget target = make_posterior_target(data, prior);

  FitResult out;
  const ParamVector start = default_start(prior);
  out.map = find_map(target, std::vector<Vector>{start.flat(), prior.mean().flat()}, options.map);
  out.proposal = observed_information(target, out.map.point, config.jitter);

  const ParamVector map_point(prior.layout(), out.map.point);
  if (options.n_chains == 1) {
    out.chains.push_back(run_adaptive_mh(target, config, map_point, out.proposal));
  } else {
    out.chains = run_chains(target, config, map_point, out.proposal, options.n_chains, options.jobs);
  }
  for (auto& c : out.chains) c.map_point = out.map.point;
  out.pooled = pool_chains(out.chains);
  out.summary = summarize(out.pooled, data);
  return out;
}

}  // namespace jcs
