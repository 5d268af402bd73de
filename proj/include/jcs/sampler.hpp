#ifndef JCS_SAMPLER_HPP
#define JCS_SAMPLER_HPP

#include "jcs/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace jcs {

/// Unnormalized log density. May return -inf (zero density); must be
/// side-effect free so it can be shared between chains.
using LogTarget = std::function<double(const Vector&)>;

struct MCMCConfig {
  long iterations = 20000;
  long burn_in = 4000;
  long thin = 10;
  long adapt_start = 1000;
  long adapt_interval = 500;
  std::optional<long> adapt_window;  // empty: all history
  double proposal_scale = 1.0;
  double jitter = 1e-8;
  std::uint64_t seed = 20240101;

  long retained() const noexcept { return thin > 0 ? (iterations - burn_in) / thin : 0; }
  /// Throws ValidationError if any invariant fails for a target of dimension `dim`.
  void validate(Index dim) const;

  /// Paper-scale settings of the simulation studies: 100,000 / 10,000 / 30.
  static MCMCConfig paper_scale();
};

/// Post burn-in, thinned draws plus sampler metadata.
struct Chain {
  Matrix draws;                     // retained x dim
  std::vector<std::string> labels;  // one per column
  std::optional<ParamLayout> layout;
  double acceptance_rate = 0.0;
  Vector map_point;
  Matrix proposal_cov_final;
  MCMCConfig config;
  std::vector<std::string> warnings;

  Index size() const noexcept { return draws.rows(); }
  Index dim() const noexcept { return draws.cols(); }
  ParamVector draw(Index s) const;
  /// Chain with the same metadata and the given draws.
  Chain with_draws(Matrix new_draws) const;
};

struct MapOptions {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-9;  // relative to 1 + |f|
};

struct MapResult {
  Vector point;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Central finite-difference gradient, step max(1e-5, 1e-5 |x_k|).
Vector numeric_gradient(const LogTarget& target, const Vector& x);

/// Central finite-difference Hessian.
Matrix numeric_hessian(const LogTarget& target, const Vector& x);

/// Quasi-Newton (BFGS) ascent with backtracking line search.
MapResult find_map(const LogTarget& target, const Vector& init, const MapOptions& options = {});

/// Runs find_map from every start and keeps the best.
MapResult find_map(const LogTarget& target, const std::vector<Vector>& starts, const MapOptions& options = {});

/// Inverse of the negated Hessian at `at`, symmetrized, with covariance
/// eigenvalues floored at `jitter`.
Matrix observed_information(const LogTarget& target, const Vector& at, double jitter = 1e-8);

/// Adaptive random-walk Metropolis. Proposal covariance starts at
/// `initial_proposal` (identity when absent) and is replaced every
/// adapt_interval iterations after adapt_start by
/// (2.38^2 / dim) * cov(history) + jitter * I.
Chain run_adaptive_mh(const LogTarget& target, const MCMCConfig& config, const Vector& init,
                      const std::optional<Matrix>& initial_proposal = std::nullopt);

/// Same, labelling columns from the parameter layout.
Chain run_adaptive_mh(const LogTarget& target, const MCMCConfig& config, const ParamVector& init,
                      const std::optional<Matrix>& initial_proposal = std::nullopt);

/// Independent chains on streams derived from config.seed, run on up to `jobs` threads.
std::vector<Chain> run_chains(const LogTarget& target, const MCMCConfig& config, const ParamVector& init,
                              const std::optional<Matrix>& initial_proposal, int n_chains, int jobs = 1);

}  // namespace jcs

#endif  // JCS_SAMPLER_HPP
