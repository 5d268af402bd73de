#include "jcs/simulator.hpp"

#include "jcs/estimation.hpp"
#include "jcs/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

namespace jcs {

namespace {

constexpr int kTruthPoints = 10;

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string to_string(Censoring c) { return c == Censoring::Fixed ? "fixed" : "uniform"; }
std::string to_string(Frailty f) { return f == Frailty::Gamma ? "gamma" : "lognormal-mixture"; }

Censoring censoring_from_string(const std::string& s) {
  if (s == "fixed") return Censoring::Fixed;
  if (s == "uniform") return Censoring::Uniform;
  throw ValidationError("censoring must be \"fixed\" or \"uniform\", got \"" + s + "\"");
}

Frailty frailty_from_string(const std::string& s) {
  if (s == "gamma") return Frailty::Gamma;
  if (s == "lognormal-mixture") return Frailty::LognormalMixture;
  throw ValidationError("frailty must be \"gamma\" or \"lognormal-mixture\", got \"" + s + "\"");
}

void Scenario::validate() const {
  if (n < 1) throw ValidationError("scenario: n must be at least 1");
  if (!std::isfinite(beta11) || !std::isfinite(beta21)) throw ValidationError("scenario: betas must be finite");
  if (frailty == Frailty::Gamma && !(psi > 0.0 && std::isfinite(psi)))
    throw ValidationError("scenario: psi must be positive under gamma frailty");
}

Vector Scenario::fixed_grid() { return Vector::LinSpaced(kTruthPoints, 0.1, 1.0); }

double draw_frailty(Frailty frailty, double psi, Rng& rng) {
  if (frailty == Frailty::Gamma) {
    std::gamma_distribution<double> gamma(1.0 / psi, psi);
    return gamma(rng);
  }
  std::bernoulli_distribution pick(0.5);
  if (pick(rng)) {
    std::lognormal_distribution<double> ln(-0.32, 0.8);  // sigma^2 = 0.64
    return ln(rng);
  }
  std::lognormal_distribution<double> ln(-0.125, 0.5);  // sigma^2 = 0.25
  return ln(rng);
}

Observation simulate_subject(const Scenario& scenario, double u, double x11, double x21, double omega, Rng& rng) {
  Observation obs;
  obs.u = u;
  obs.x1 = Vector::Constant(1, x11);
  obs.x2 = Vector::Constant(1, x21);
  const double count_mean = omega * Scenario::lambda10_truth(u) * std::exp(scenario.beta11 * x11);
  obs.n_count = count_mean > 0.0 ? std::poisson_distribution<long>(count_mean)(rng) : 0;
  const double hazard = omega * Scenario::lambda20_truth(u) * std::exp(scenario.beta21 * x21);
  std::bernoulli_distribution status(-std::expm1(-hazard));
  obs.delta = status(rng) ? 1 : 0;
  return obs;
}

Dataset simulate_dataset(const Scenario& scenario) {
  scenario.validate();
  Rng rng = make_rng(scenario.seed);
  std::bernoulli_distribution coin(0.5);

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(scenario.n));
  const Vector fixed = Scenario::fixed_grid();
  if (scenario.censoring == Censoring::Fixed) {
    // Multinomial(n; 0.1, ..., 0.1) via conditional binomials.
    long remaining = scenario.n;
    for (int d = 0; d < kTruthPoints; ++d) {
      long count = remaining;
      if (d + 1 < kTruthPoints) {
        const double p = 1.0 / static_cast<double>(kTruthPoints - d);
        count = std::binomial_distribution<long>(remaining, p)(rng);
      }
      remaining -= count;
      times.insert(times.end(), static_cast<std::size_t>(count), fixed(d));
    }
  } else {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (long i = 0; i < scenario.n; ++i) {
      double u = 0.0;
      while (u <= 0.0) u = unif(rng);
      times.push_back(u);
    }
  }

  std::vector<Observation> obs;
  obs.reserve(times.size());
  for (double u : times) {
    const double x11 = coin(rng) ? 1.0 : 0.0;
    const double x21 = coin(rng) ? 1.0 : 0.0;
    const double omega = draw_frailty(scenario.frailty, scenario.psi, rng);
    obs.push_back(simulate_subject(scenario, u, x11, x21, omega, rng));
  }
  if (scenario.censoring == Censoring::Fixed) return Dataset(std::move(obs), fixed, 1, 1);
  return Dataset::with_inferred_grid(std::move(obs), 1, 1);
}

PriorSpec default_priors(const Scenario& scenario, const Vector& grid) {
  scenario.validate();
  const Index m = grid.size();
  Vector phi_mean(m), nu_mean(m);
  double prev = 0.0;
  for (Index d = 0; d < m; ++d) {
    const double width = grid(d) - prev;
    phi_mean(d) = std::log((Scenario::lambda10_truth(grid(d)) - Scenario::lambda10_truth(prev)) / width);
    nu_mean(d) = std::log(Scenario::lambda20_truth(grid(d)) - Scenario::lambda20_truth(prev));
    prev = grid(d);
  }
  const Vector one = Vector::Constant(1, 1.0);
  const Vector hundred = Vector::Constant(1, 100.0);
  return PriorSpec(phi_mean, Vector::Constant(m, 100.0), nu_mean, ar1_correlation(m, 0.2), one, hundred, one,
                   hundred, 1.0, 100.0);
}

const OperatingCharacteristics& ReplicationReport::find(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw ValidationError("no row named " + name + " in replication report");
}

ReplicateResult run_replicate(const Scenario& scenario, const MCMCConfig& mcmc) {
  const Dataset data = simulate_dataset(scenario);
  const PriorSpec prior = default_priors(scenario, data.grid());
  const FitResult fit = fit_model(data, prior, mcmc);

  ReplicateResult r;
  r.estimate.resize(3);
  r.psd.resize(3);
  r.lower.resize(3);
  r.upper.resize(3);
  const char* names[] = {"beta1_1", "beta2_1", "psi"};
  for (int k = 0; k < 3; ++k) {
    const ParameterSummary& ps = fit.summary.find(names[k]);
    r.estimate(k) = ps.estimate;
    r.psd(k) = ps.psd;
    r.lower(k) = ps.lower;
    r.upper(k) = ps.upper;
  }
  const BaselineFit baseline{fit.summary.baseline};
  const Vector points = Scenario::fixed_grid();
  for (Index d = 0; d < points.size(); ++d) {
    const double t = points(d);
    r.mse_lambda10 += std::pow(baseline.lambda10(t) - Scenario::lambda10_truth(t), 2);
    r.mse_lambda20 += std::pow(baseline.lambda20(t) - Scenario::lambda20_truth(t), 2);
  }
  r.mse_lambda10 /= static_cast<double>(points.size());
  r.mse_lambda20 /= static_cast<double>(points.size());
  r.acceptance = fit.pooled.acceptance_rate;
  return r;
}

ReplicationReport aggregate_replicates(const Scenario& scenario, const MCMCConfig& mcmc,
                                       const std::vector<ReplicateResult>& results) {
  ReplicationReport rep;
  rep.scenario = scenario;
  rep.mcmc = mcmc;
  rep.replicates = static_cast<int>(results.size());
  if (results.empty()) return rep;

  const bool with_psi = scenario.frailty == Frailty::Gamma;
  const double truths[] = {scenario.beta11, scenario.beta21, scenario.psi};
  const char* names[] = {"beta11", "beta21", "psi"};
  const double count = static_cast<double>(results.size());
  for (int k = 0; k < (with_psi ? 3 : 2); ++k) {
    OperatingCharacteristics oc;
    oc.name = names[k];
    oc.truth = truths[k];
    std::vector<double> means;
    double covered = 0.0;
    for (const auto& r : results) {
      means.push_back(r.estimate(k));
      oc.mean += r.estimate(k);
      oc.esd += r.psd(k);
      if (r.lower(k) <= oc.truth && oc.truth <= r.upper(k)) covered += 1.0;
    }
    oc.mean /= count;
    oc.esd /= count;
    oc.abs_bias = std::abs(oc.mean - oc.truth);
    oc.sse = sample_sd(means);
    oc.cp = covered / count;
    rep.rows.push_back(oc);
  }
  for (const auto& r : results) {
    rep.mean_mse_lambda10 += r.mse_lambda10;
    rep.mean_mse_lambda20 += r.mse_lambda20;
    rep.mean_acceptance += r.acceptance;
  }
  rep.mean_mse_lambda10 /= count;
  rep.mean_mse_lambda20 /= count;
  rep.mean_acceptance /= count;
  return rep;
}

ReplicationReport replicate_study(const Scenario& scenario, int replicates, const MCMCConfig& mcmc,
                                  const ReplicationOptions& options) {
  if (replicates < 2) throw ValidationError("replicate_study: need at least two replicates");
  scenario.validate();

  std::vector<std::optional<ReplicateResult>> slots(static_cast<std::size_t>(replicates));
  std::vector<std::string> errors(static_cast<std::size_t>(replicates));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < replicates; r = next++) {
      Scenario sc = scenario;
      MCMCConfig mc = mcmc;
      sc.seed = stream_seed(scenario.seed, options.shared_data_seed ? 0 : static_cast<std::uint64_t>(r));
      mc.seed = stream_seed(mcmc.seed, options.shared_mcmc_seed ? 0 : static_cast<std::uint64_t>(r));
      try {
        slots[static_cast<std::size_t>(r)] = run_replicate(sc, mc);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(r)] = e.what();
      }
    }
  };
  const int threads = std::clamp(options.jobs, 1, replicates);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ReplicateResult> ok;
  std::vector<std::string> failures;
  for (std::size_t r = 0; r < slots.size(); ++r) {
    if (slots[r])
      ok.push_back(std::move(*slots[r]));
    else
      failures.push_back("replicate " + std::to_string(r) + ": " + errors[r]);
  }
  if (static_cast<double>(failures.size()) > 0.1 * replicates)
    throw NumericError("replicate_study: " + std::to_string(failures.size()) + " of " + std::to_string(replicates) +
                       " replicates failed; first: " + failures.front());
  ReplicationReport rep = aggregate_replicates(scenario, mcmc, ok);
  rep.failures = static_cast<int>(failures.size());
  rep.failure_messages = std::move(failures);
  return rep;
}

}  // namespace jcs
