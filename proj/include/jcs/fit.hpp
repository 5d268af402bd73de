#ifndef JCS_FIT_HPP
#define JCS_FIT_HPP

#include "jcs/estimation.hpp"
#include "jcs/priors.hpp"
#include "jcs/sampler.hpp"

#include <vector>

namespace jcs {

/// Log posterior over flat parameter vectors. Numeric overflow inside the
/// likelihood maps to -inf so the sampler rejects instead of aborting.
/// `data` and `prior` must outlive the returned callable.
LogTarget make_posterior_target(const Dataset& data, const PriorSpec& prior);

/// Baseline blocks at their prior means, regressions at 0, psi* = 0.
ParamVector default_start(const PriorSpec& prior);

struct FitOptions {
  int n_chains = 1;
  int jobs = 1;
  MapOptions map;
};

struct FitResult {
  MapResult map;
  Matrix proposal;           // inverse observed information at the MAP
  std::vector<Chain> chains;
  Chain pooled;              // all chains stacked
  FitSummary summary;        // from the pooled draws
};

/// MAP (multi-start) -> observed information -> adaptive MH -> summary.
FitResult fit_model(const Dataset& data, const PriorSpec& prior, const MCMCConfig& config,
                    const FitOptions& options = {});

/// Rows of every chain stacked; metadata from the first.
Chain pool_chains(const std::vector<Chain>& chains);

}  // namespace jcs

#endif  // JCS_FIT_HPP
