#ifndef JCS_COMMANDS_HPP
#define JCS_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jcs {

/// Everything a CLI invocation needs. Paths left empty mean "not given".
struct RunConfig {
  std::string command;  // simulate | fit | diagnose | replicate
  std::filesystem::path data;
  std::filesystem::path priors;
  std::filesystem::path mcmc;
  std::filesystem::path scenario;
  std::filesystem::path fit_config;
  std::vector<std::filesystem::path> chains;  // diagnose: chain CSVs (sidecar <stem>.json beside each)
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool paper_scale = false;
  std::optional<int> replicates;
  std::optional<int> n_chains;
  bool shared_data_seed = false;
  bool shared_mcmc_seed = false;
  int verbosity = 1;
};

/// Checks that read paths exist and the output directory can be created.
void validate_run_config(const RunConfig& config);

void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_fit(const RunConfig& config, std::ostream& log);
void cmd_diagnose(const RunConfig& config, std::ostream& log);
void cmd_replicate(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command and maps errors to exit codes:
/// 0 success, 2 validation error, 3 numeric failure, 1 anything else.
int run_command(const RunConfig& config, std::ostream& log, std::ostream& err);

std::string version();

}  // namespace jcs

#endif  // JCS_COMMANDS_HPP
