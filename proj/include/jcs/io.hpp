#ifndef JCS_IO_HPP
#define JCS_IO_HPP

// Text formats: dataset and chain CSVs, JSON configs (priors, MCMC, scenario,
// fit options), JSON sidecars and the aligned report tables.

#include "jcs/diagnostics.hpp"
#include "jcs/estimation.hpp"
#include "jcs/priors.hpp"
#include "jcs/sampler.hpp"
#include "jcs/simulator.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jcs {

/// u_model = (u_data - offset) * scale, applied at load and inverted for reporting.
struct TimeScale {
  double offset = 0.0;
  double scale = 1.0;

  double apply(double u) const { return (u - offset) * scale; }
  double invert(double t) const { return t / scale + offset; }
  bool identity() const { return offset == 0.0 && scale == 1.0; }
};

struct CovariateProfile {
  std::string name;
  Vector x1;
  Vector x2;
};

/// Optional knobs of a fit, read from --fit-config.
struct FitConfig {
  std::optional<Vector> grid;  // data time units
  TimeScale time_scale;
  std::vector<CovariateProfile> profiles;  // default: all-zero covariates
  std::optional<Vector> time_mesh;         // data time units; default: grid
  int chains = 1;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Header required: u, delta, n_count, x1_1..x1_p, x2_1..x2_q (any order).
/// The grid is the sorted distinct u unless `grid` is given.
Dataset parse_dataset_csv(std::istream& in, const std::optional<Vector>& grid = std::nullopt,
                          const TimeScale& time_scale = {});
Dataset read_dataset_csv(const std::filesystem::path& path, const std::optional<Vector>& grid = std::nullopt,
                         const TimeScale& time_scale = {});
void write_dataset_csv(const Dataset& data, std::ostream& out);

/// Draws with labelled header; one row per retained draw.
void write_chain_csv(const Chain& chain, std::ostream& out);
/// Seed, config, acceptance rate, MAP point, final proposal, layout.
std::string chain_metadata_json(const Chain& chain);
Chain read_chain(const std::filesystem::path& csv_path, const std::filesystem::path& metadata_path);

std::string mcmc_config_json(const MCMCConfig& config);
MCMCConfig parse_mcmc_config(const std::string& json_text, const MCMCConfig& defaults = {});
std::string scenario_json(const Scenario& scenario);
Scenario parse_scenario(const std::string& json_text);
/// Blocks absent from the file fall back to N(0, 10^2) per component.
PriorSpec parse_prior_spec(const std::string& json_text, const ParamLayout& layout);
std::string prior_spec_json(const PriorSpec& prior);
FitConfig parse_fit_config(const std::string& json_text, Index p, Index q);

std::string format_summary_table(const FitSummary& summary);
std::string summary_json(const FitSummary& summary);

void write_influence_csv(const InfluenceReport& report, std::ostream& out);
void write_kl_plot_csv(const InfluenceReport& report, std::ostream& out);
std::string model_fit_json(const InfluenceReport& report);
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);
void write_acf_csv(const ConvergenceReport& report, std::ostream& out);

std::string format_replication_table(const ReplicationReport& report);
std::string replication_json(const ReplicationReport& report);
void write_replication_csv(const ReplicationReport& report, std::ostream& out);

}  // namespace jcs

#endif  // JCS_IO_HPP
