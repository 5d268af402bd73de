#include "jcs/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

void add_common(CLI::App* sub, jcs::RunConfig& rc) {
  sub->add_option("--out", rc.out, "Output directory")->required();
  sub->add_option("--seed", rc.seed, "Seed override");
  sub->add_flag("-q,--quiet", [&rc](std::int64_t) { rc.verbosity = 0; }, "Suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
  jcs::RunConfig rc;
  CLI::App app{"Joint current count / current status model: simulate, fit, diagnose, replicate"};
  app.set_version_flag("--version", jcs::version());
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Simulate a dataset from a scenario");
  simulate->add_option("--scenario", rc.scenario, "Scenario JSON")->required();
  add_common(simulate, rc);

  auto* fit = app.add_subcommand("fit", "MAP + adaptive MH fit of a dataset");
  fit->add_option("--data", rc.data, "Dataset CSV")->required();
  fit->add_option("--priors", rc.priors, "Prior JSON (default: N(0, 10^2) everywhere)");
  fit->add_option("--mcmc", rc.mcmc, "MCMC settings JSON");
  fit->add_option("--fit-config", rc.fit_config, "Grid, time rescale, covariate profiles, plot mesh");
  fit->add_option("--chains", rc.n_chains, "Number of independent chains");
  fit->add_option("--jobs", rc.jobs, "Worker threads for multiple chains");
  fit->add_flag("--paper-scale", rc.paper_scale, "100,000 iterations, burn-in 20,000, thin 60");
  add_common(fit, rc);

  auto* diagnose = app.add_subcommand("diagnose", "DIC, LPML, CPO/KL influence and convergence");
  diagnose->add_option("--data", rc.data, "Dataset CSV")->required();
  diagnose->add_option("--chain", rc.chains, "Chain CSV written by fit (repeatable)")->required();
  diagnose->add_option("--fit-config", rc.fit_config, "Same fit config as the fit, if one was used");
  add_common(diagnose, rc);

  auto* replicate = app.add_subcommand("replicate", "Simulation study over replicated datasets");
  replicate->add_option("--scenario", rc.scenario, "Scenario JSON (default: 0.6, 0.8, 1, fixed, n=500)");
  replicate->add_option("--mcmc", rc.mcmc, "MCMC settings JSON");
  replicate->add_option("--replicates", rc.replicates, "Number of replicates (default 100, or 500 at paper scale)");
  replicate->add_option("--jobs", rc.jobs, "Worker threads");
  replicate->add_flag("--paper-scale", rc.paper_scale, "R=500, 100,000 iterations, burn-in 10,000, thin 30");
  replicate->add_flag("--shared-data-seed", rc.shared_data_seed, "Every replicate analyses the same dataset");
  replicate->add_flag("--shared-mcmc-seed", rc.shared_mcmc_seed, "Every replicate uses the same MCMC stream");
  add_common(replicate, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  rc.command = app.get_subcommands().front()->get_name();
  return jcs::run_command(rc, std::cout, std::cerr);
}
