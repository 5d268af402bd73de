#include "jcs/commands.hpp"

#include "jcs/diagnostics.hpp"
#include "jcs/estimation.hpp"
#include "jcs/fit.hpp"
#include "jcs/io.hpp"
#include "jcs/simulator.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#ifndef JCS_VERSION
#define JCS_VERSION "0.0.0"
#endif

namespace jcs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json input_record(const fs::path& path) {
  if (path.empty()) return nullptr;
  return {{"path", path.string()}, {"fnv1a64", fnv1a(read_text_file(path))}};
}

json json_of(const std::string& text) { return json::parse(text); }

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
  std::ostringstream ss;
  writer(ss);
  write_text_file(path, ss.str());
}

void prepare_output(const fs::path& out) {
  if (out.empty()) throw ValidationError("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ValidationError("cannot create output directory " + out.string());
}

void write_manifest(const fs::path& out, json manifest) {
  manifest["version"] = version();
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
}

MCMCConfig resolve_mcmc(const RunConfig& rc, MCMCConfig base) {
  if (!rc.mcmc.empty()) base = parse_mcmc_config(read_text_file(rc.mcmc), base);
  if (rc.seed) base.seed = *rc.seed;
  return base;
}

FitConfig resolve_fit_config(const RunConfig& rc, Index p, Index q) {
  if (rc.fit_config.empty()) return {};
  return parse_fit_config(read_text_file(rc.fit_config), p, q);
}

// Reads the dataset once for its covariate counts, then again with the fit config applied.
std::pair<Dataset, FitConfig> load_data(const RunConfig& rc) {
  if (rc.data.empty()) throw ValidationError("--data is required");
  const Dataset raw = read_dataset_csv(rc.data);
  FitConfig fc = resolve_fit_config(rc, raw.p(), raw.q());
  if (!fc.grid && fc.time_scale.identity()) return {raw, fc};
  return {read_dataset_csv(rc.data, fc.grid, fc.time_scale), fc};
}

fs::path sidecar_of(const fs::path& csv) {
  fs::path meta = csv;
  meta.replace_extension(".json");
  return meta;
}

json time_scale_json(const TimeScale& ts) { return {{"offset", ts.offset}, {"scale", ts.scale}}; }

void log_line(const RunConfig& rc, std::ostream& log, const std::string& line) {
  if (rc.verbosity > 0) log << line << '\n';
}

}  // namespace

std::string version() { return JCS_VERSION; }

void validate_run_config(const RunConfig& rc) {
  for (const fs::path* p : {&rc.data, &rc.priors, &rc.mcmc, &rc.scenario, &rc.fit_config})
    if (!p->empty() && !fs::exists(*p)) throw ValidationError("input file not found: " + p->string());
  for (const auto& c : rc.chains) {
    if (!fs::exists(c)) throw ValidationError("chain file not found: " + c.string());
    if (!fs::exists(sidecar_of(c))) throw ValidationError("chain sidecar not found: " + sidecar_of(c).string());
  }
  if (rc.jobs < 1) throw ValidationError("--jobs must be at least 1");
  if (rc.replicates && *rc.replicates < 2) throw ValidationError("--replicates must be at least 2");
  if (rc.n_chains && *rc.n_chains < 1) throw ValidationError("--chains must be at least 1");
}

void cmd_simulate(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  if (rc.scenario.empty()) throw ValidationError("simulate: --scenario is required");
  Scenario sc = parse_scenario(read_text_file(rc.scenario));
  if (rc.seed) sc.seed = *rc.seed;
  prepare_output(rc.out);

  const Dataset data = simulate_dataset(sc);
  write_stream(rc.out / "data.csv", [&](std::ostream& o) { write_dataset_csv(data, o); });
  write_text_file(rc.out / "data.json", scenario_json(sc));

  json m;
  m["command"] = "simulate";
  m["inputs"] = {{"scenario", input_record(rc.scenario)}};
  m["scenario"] = json_of(scenario_json(sc));
  m["seeds"] = {{"data", sc.seed}};
  m["outputs"] = {"data.csv", "data.json"};
  write_manifest(rc.out, m);
  log_line(rc, log, "simulated " + std::to_string(data.size()) + " subjects -> " + (rc.out / "data.csv").string());
}

void cmd_fit(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  auto [data, fc] = load_data(rc);
  const ParamLayout layout = ParamLayout::of(data);
  const PriorSpec prior =
      rc.priors.empty() ? PriorSpec::vague(layout) : parse_prior_spec(read_text_file(rc.priors), layout);
  prior.check_compatible(data);
  MCMCConfig base;
  if (rc.paper_scale) {
    base.iterations = 100000;
    base.burn_in = 20000;
    base.thin = 60;
  }
  const MCMCConfig mcmc = resolve_mcmc(rc, base);
  mcmc.validate(layout.dim());
  prepare_output(rc.out);

  FitOptions options;
  options.n_chains = rc.n_chains.value_or(fc.chains);
  options.jobs = rc.jobs;
  log_line(rc, log,
           "fitting " + std::to_string(data.size()) + " subjects, n'=" + std::to_string(layout.n_prime) + ", " +
               std::to_string(options.n_chains) + " chain(s) of " + std::to_string(mcmc.iterations) + " iterations");
  const FitResult fit = fit_model(data, prior, mcmc, options);

  json outputs = json::array();
  json chain_seeds = json::array();
  for (std::size_t k = 0; k < fit.chains.size(); ++k) {
    const std::string stem = fit.chains.size() == 1 ? "chain" : "chain_" + std::to_string(k + 1);
    write_stream(rc.out / (stem + ".csv"), [&](std::ostream& o) { write_chain_csv(fit.chains[k], o); });
    write_text_file(rc.out / (stem + ".json"), chain_metadata_json(fit.chains[k]));
    outputs.push_back(stem + ".csv");
    outputs.push_back(stem + ".json");
    chain_seeds.push_back(fit.chains[k].config.seed);
  }
  write_text_file(rc.out / "summary.txt", format_summary_table(fit.summary));
  write_text_file(rc.out / "summary.json", summary_json(fit.summary));

  // Plot data on the data time scale.
  const BayesEstimates est = bayes_estimates(fit.pooled);
  const BaselineFit baseline{fit.summary.baseline};
  Vector mesh = data.grid();
  if (fc.time_mesh) {
    mesh = *fc.time_mesh;
    for (Index k = 0; k < mesh.size(); ++k) mesh(k) = fc.time_scale.apply(mesh(k));
  }
  std::vector<CovariateProfile> profiles = fc.profiles;
  if (profiles.empty()) profiles.push_back({"baseline", Vector::Zero(data.p()), Vector::Zero(data.q())});
  write_stream(rc.out / "baseline.csv", [&](std::ostream& o) {
    o << "t,lambda10,lambda20\n";
    for (Index k = 0; k < mesh.size(); ++k) {
      const double t = std::max(mesh(k), 0.0);
      o << json(fc.time_scale.invert(t)).dump() << ',' << json(baseline.lambda10(t)).dump() << ','
        << json(baseline.lambda20(t)).dump() << '\n';
    }
  });
  write_stream(rc.out / "marginal.csv", [&](std::ostream& o) {
    o << "profile,t,mean_function,survival\n";
    for (const auto& prof : profiles) {
      for (Index k = 0; k < mesh.size(); ++k) {
        const double t = std::max(mesh(k), 0.0);
        o << prof.name << ',' << json(fc.time_scale.invert(t)).dump() << ','
          << json(marginal_mean(t, prof.x1, fit.summary.baseline, est.beta1_hat)).dump() << ','
          << json(marginal_survival(t, prof.x2, fit.summary.baseline, est.beta2_hat, est.psi_hat)).dump() << '\n';
      }
    }
  });
  for (const char* f : {"summary.txt", "summary.json", "baseline.csv", "marginal.csv"}) outputs.push_back(f);

  json m;
  m["command"] = "fit";
  m["inputs"] = {{"data", input_record(rc.data)},
                 {"priors", input_record(rc.priors)},
                 {"mcmc", input_record(rc.mcmc)},
                 {"fit_config", input_record(rc.fit_config)}};
  m["priors"] = json_of(prior_spec_json(prior));
  m["mcmc"] = json_of(mcmc_config_json(mcmc));
  m["paper_scale"] = rc.paper_scale;
  m["chains"] = options.n_chains;
  m["jobs"] = options.jobs;
  m["grid"] = std::vector<double>(data.grid().data(), data.grid().data() + data.grid().size());
  m["time_scale"] = time_scale_json(fc.time_scale);
  m["seeds"] = {{"master", mcmc.seed}, {"chains", chain_seeds}};
  m["map"] = {{"value", fit.map.value},
              {"converged", fit.map.converged},
              {"iterations", fit.map.iterations},
              {"gradient_norm", fit.map.gradient_norm}};
  m["acceptance_rate"] = fit.pooled.acceptance_rate;
  m["outputs"] = outputs;
  write_manifest(rc.out, m);

  std::ostringstream rate;
  rate << "acceptance rate " << fit.pooled.acceptance_rate;
  log_line(rc, log, rate.str());
  if (rc.verbosity > 0) log << format_summary_table(fit.summary);
  for (const auto& c : fit.chains)
    for (const auto& w : c.warnings) log_line(rc, log, "warning: " + w);
}

void cmd_diagnose(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  if (rc.chains.empty()) throw ValidationError("diagnose: at least one --chain is required");
  auto [data, fc] = load_data(rc);
  const ParamLayout layout = ParamLayout::of(data);

  std::vector<Chain> chains;
  for (const auto& path : rc.chains) {
    Chain c = read_chain(path, sidecar_of(path));
    if (!c.layout) c.layout = layout;
    if (!(*c.layout == layout) || c.dim() != layout.dim())
      throw ValidationError("chain " + path.string() + " does not match the dataset: chain has n'=" +
                            std::to_string(c.layout->n_prime) + ", p=" + std::to_string(c.layout->p) +
                            ", q=" + std::to_string(c.layout->q) + "; dataset has n'=" +
                            std::to_string(layout.n_prime) + ", p=" + std::to_string(layout.p) +
                            ", q=" + std::to_string(layout.q));
    if (c.size() == 0) throw ValidationError("chain " + path.string() + " has no draws");
    chains.push_back(std::move(c));
  }
  prepare_output(rc.out);

  const Chain pooled = pool_chains(chains);
  const InfluenceReport inf = influence_report(pooled, data);
  write_stream(rc.out / "influence.csv", [&](std::ostream& o) { write_influence_csv(inf, o); });
  write_stream(rc.out / "kl_plot.csv", [&](std::ostream& o) { write_kl_plot_csv(inf, o); });
  write_text_file(rc.out / "model_fit.json", model_fit_json(inf));

  const ConvergenceReport conv = convergence_report(chains);
  write_stream(rc.out / "convergence.csv", [&](std::ostream& o) { write_convergence_csv(conv, o); });
  write_stream(rc.out / "acf.csv", [&](std::ostream& o) { write_acf_csv(conv, o); });

  json chain_inputs = json::array();
  for (const auto& p : rc.chains) chain_inputs.push_back(input_record(p));
  json m;
  m["command"] = "diagnose";
  m["inputs"] = {{"data", input_record(rc.data)}, {"chains", chain_inputs}, {"fit_config", input_record(rc.fit_config)}};
  m["time_scale"] = time_scale_json(fc.time_scale);
  m["acceptance_rates"] = conv.acceptance_rates;
  m["warnings"] = conv.warnings;
  m["outputs"] = {"influence.csv", "kl_plot.csv", "model_fit.json", "convergence.csv", "acf.csv"};
  write_manifest(rc.out, m);

  std::ostringstream s;
  s << "DIC " << inf.dic << "  pD " << inf.p_d << "  LPML " << inf.lpml << "  influential "
    << inf.influential_count() << " of " << data.size();
  log_line(rc, log, s.str());
  for (const auto& w : inf.warnings) log_line(rc, log, "warning: " + w);
  for (const auto& w : conv.warnings) log_line(rc, log, "warning: " + w);
}

void cmd_replicate(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  Scenario sc = rc.scenario.empty() ? Scenario{} : parse_scenario(read_text_file(rc.scenario));
  MCMCConfig mcmc = rc.mcmc.empty() ? (rc.paper_scale ? MCMCConfig::paper_scale() : MCMCConfig{})
                                    : parse_mcmc_config(read_text_file(rc.mcmc),
                                                        rc.paper_scale ? MCMCConfig::paper_scale() : MCMCConfig{});
  if (rc.seed) {
    sc.seed = *rc.seed;
    mcmc.seed = stream_seed(*rc.seed, 0x6d636d63ULL);
  }
  const int replicates = rc.replicates.value_or(rc.paper_scale ? 500 : 100);
  mcmc.validate(2 * Scenario::fixed_grid().size() + 3);
  prepare_output(rc.out);

  ReplicationOptions options;
  options.jobs = rc.jobs;
  options.shared_data_seed = rc.shared_data_seed;
  options.shared_mcmc_seed = rc.shared_mcmc_seed;
  log_line(rc, log,
           "replicating " + std::to_string(replicates) + " datasets of n=" + std::to_string(sc.n) + " on " +
               std::to_string(rc.jobs) + " worker(s)");
  const ReplicationReport rep = replicate_study(sc, replicates, mcmc, options);

  write_text_file(rc.out / "replication.txt", format_replication_table(rep));
  write_text_file(rc.out / "replication.json", replication_json(rep));
  write_stream(rc.out / "replication.csv", [&](std::ostream& o) { write_replication_csv(rep, o); });
  write_stream(rc.out / "meanmse.csv", [&](std::ostream& o) {
    o << "function,meanmse\n";
    o << "lambda10," << json(rep.mean_mse_lambda10).dump() << '\n';
    o << "lambda20," << json(rep.mean_mse_lambda20).dump() << '\n';
  });

  json m;
  m["command"] = "replicate";
  m["inputs"] = {{"scenario", input_record(rc.scenario)}, {"mcmc", input_record(rc.mcmc)}};
  m["scenario"] = json_of(scenario_json(sc));
  m["mcmc"] = json_of(mcmc_config_json(mcmc));
  m["replicates"] = replicates;
  m["jobs"] = rc.jobs;
  m["paper_scale"] = rc.paper_scale;
  m["shared_data_seed"] = rc.shared_data_seed;
  m["shared_mcmc_seed"] = rc.shared_mcmc_seed;
  m["seeds"] = {{"data_master", sc.seed},
                {"mcmc_master", mcmc.seed},
                {"derivation", "replicate r uses stream_seed(master, r), or stream 0 when shared"}};
  m["outputs"] = {"replication.txt", "replication.json", "replication.csv", "meanmse.csv"};
  write_manifest(rc.out, m);
  if (rc.verbosity > 0) log << format_replication_table(rep);
}

int run_command(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    if (config.command == "simulate")
      cmd_simulate(config, log);
    else if (config.command == "fit")
      cmd_fit(config, log);
    else if (config.command == "diagnose")
      cmd_diagnose(config, log);
    else if (config.command == "replicate")
      cmd_replicate(config, log);
    else
      throw ValidationError("unknown command '" + config.command + "'");
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what();
    if (!e.block().empty()) err << " [block " << e.block() << "]";
    if (e.observation()) err << " [observation " << *e.observation() + 1 << "]";
    err << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace jcs
