#include "support.hpp"

#include "jcs/diagnostics.hpp"
#include "jcs/fit.hpp"
#include "jcs/priors.hpp"
#include "jcs/simulator.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <cmath>

using namespace jcs;
using doctest::Approx;

namespace {

Matrix random_spd(Index d, Rng& rng) {
  std::normal_distribution<double> z;
  Matrix b(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) b(i, j) = z(rng);
  return b * b.transpose() + 0.5 * Matrix::Identity(d, d);
}

MCMCConfig small_config(long iterations, std::uint64_t seed) {
  MCMCConfig c;
  c.iterations = iterations;
  c.burn_in = iterations / 5;
  c.thin = 1;
  c.adapt_start = 500;
  c.adapt_interval = 250;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("MAP of simple targets") {
  const LogTarget quad = [](const Vector& x) { return -0.5 * (x(0) - 3.0) * (x(0) - 3.0); };
  const MapResult r = find_map(quad, Vector::Zero(1));
  CHECK(r.converged);
  CHECK(std::abs(r.point(0) - 3.0) < 1e-8);

  // Flat likelihood: the MAP is the prior mean.
  const PriorSpec prior(Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(2.0, 0.5), Eigen::Vector2d(-1.0, 1.0),
                        ar1_covariance(Eigen::Vector2d(1.0, 3.0), 0.4), Vector::Constant(1, 0.7), Vector::Ones(1),
                        Vector::Constant(1, -0.4), Vector::Constant(1, 2.0), 1.0, 4.0);
  const LogTarget flat = [&prior](const Vector& x) {
    return 12.5 + log_prior(ParamVector(prior.layout(), x), prior);
  };
  const MapResult m = find_map(flat, Vector::Zero(prior.layout().dim()));
  CHECK((m.point - prior.mean().flat()).cwiseAbs().maxCoeff() < 1e-6);

  // An additive constant does not move the optimum.
  const LogTarget shifted = [&flat](const Vector& x) { return flat(x) - 1e3; };
  CHECK((find_map(shifted, Vector::Zero(prior.layout().dim())).point - m.point).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("MAP on a simulated dataset lands near the truth") {
  Scenario sc;
  sc.seed = 404;
  const Dataset data = simulate_dataset(sc);
  const PriorSpec prior = default_priors(sc, data.grid());
  const LogTarget target = make_posterior_target(data, prior);
  const MapResult m = find_map(target, std::vector<Vector>{default_start(prior).flat(), prior.mean().flat()});
  const ParamVector at(prior.layout(), m.point);
  CHECK(std::abs(at.beta1()(0) - 0.6) < 0.3);
  CHECK(std::abs(at.beta2()(0) - 0.8) < 0.3);
}

TEST_CASE("observed information of quadratic targets") {
  const LogTarget gauss = [](const Vector& x) { return -0.5 * x(0) * x(0) / 4.0; };
  CHECK(std::abs(observed_information(gauss, Vector::Constant(1, 0.7))(0, 0) - 4.0) < 1e-4);

  Rng rng = make_rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    const Index d = 2 + rep;
    const Matrix a = random_spd(d, rng);
    const Matrix a_inv = a.inverse();
    const LogTarget target = [&a](const Vector& x) { return -0.5 * x.dot(a * x); };
    const Matrix cov = observed_information(target, Vector::Zero(d));
    CHECK((cov - a_inv).cwiseAbs().maxCoeff() < 1e-4);
  }

  const PriorSpec prior = PriorSpec(Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.5, 2.0), Eigen::Vector2d(0.0, 0.0),
                                    ar1_covariance(Eigen::Vector2d(1.0, 2.0), 0.3), Vector::Zero(1),
                                    Vector::Constant(1, 3.0), Vector::Zero(1), Vector::Ones(1), 0.0, 0.25);
  const LogTarget prior_target = [&prior](const Vector& x) {
    return log_prior(ParamVector(prior.layout(), x), prior);
  };
  const Matrix cov = observed_information(prior_target, prior.mean().flat());
  CHECK((cov - prior.covariance()).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("constant target accepts everything") {
  const LogTarget flat = [](const Vector&) { return 0.0; };
  MCMCConfig c = small_config(2000, 1);
  c.adapt_start = 100000;  // keep the identity proposal
  c.iterations = 2000;
  const Chain chain = run_adaptive_mh(flat, c, Vector::Zero(2));
  CHECK(chain.acceptance_rate == 1.0);
  // Increments of a random walk with identity proposal have unit variance.
  const Matrix inc = chain.draws.bottomRows(chain.size() - 1) - chain.draws.topRows(chain.size() - 1);
  const double var = inc.array().square().mean();
  CHECK(var == Approx(1.0).epsilon(0.1));
}

TEST_CASE("standard normal target moments") {
  const LogTarget normal = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  MCMCConfig c = small_config(50000, 17);
  const Chain chain = run_adaptive_mh(normal, c, Vector::Constant(1, 2.0));
  const Vector col = chain.draws.col(0);
  const double ess = ess_and_acf(col, 100).ess;
  const double mean = col.mean();
  const double var = (col.array() - mean).square().sum() / static_cast<double>(col.size() - 1);
  CHECK(std::abs(mean) < 3.0 / std::sqrt(ess));
  CHECK(std::abs(var - 1.0) < 0.1);
  CHECK(chain.acceptance_rate > 0.2);
  CHECK(chain.acceptance_rate < 0.7);
}

TEST_CASE("flat likelihood recovers the prior") {
  const PriorSpec prior(Eigen::Vector2d(0.5, -0.5), Eigen::Vector2d(1.0, 4.0), Eigen::Vector2d(-2.0, -1.0),
                        ar1_covariance(Eigen::Vector2d(1.0, 1.0), 0.2), Vector::Constant(1, 1.0), Vector::Ones(1),
                        Vector::Constant(1, 1.0), Vector::Constant(1, 0.25), 0.0, 1.0);
  const LogTarget target = [&prior](const Vector& x) { return log_prior(ParamVector(prior.layout(), x), prior); };
  MCMCConfig c = small_config(60000, 99);
  c.thin = 5;
  const Chain chain = run_adaptive_mh(target, c, prior.mean());
  const Vector mean = prior.mean().flat();
  const Vector var = prior.covariance().diagonal();
  for (Index k = 0; k < chain.dim(); ++k) {
    const Vector col = chain.draws.col(k);
    const double m = col.mean();
    const double v = (col.array() - m).square().sum() / static_cast<double>(col.size() - 1);
    const double se = std::sqrt(v / ess_and_acf(col, 100).ess);
    CAPTURE(k);
    CHECK(std::abs(m - mean(k)) < 3.0 * se);
    CHECK(std::abs(v / var(k) - 1.0) < 0.1);
  }
}

TEST_CASE("chains are reproducible and labelled") {
  const LogTarget normal = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  const MCMCConfig c = small_config(3000, 5);
  const ParamVector init(ParamLayout{1, 1, 1});
  const Chain a = run_adaptive_mh(normal, c, init);
  const Chain b = run_adaptive_mh(normal, c, init);
  CHECK(a.draws == b.draws);
  CHECK(a.acceptance_rate == b.acceptance_rate);
  CHECK(a.labels == init.layout().labels());
  CHECK(a.size() == c.retained());

  MCMCConfig other = c;
  other.seed = 6;
  CHECK(run_adaptive_mh(normal, other, init).draws != a.draws);

  const auto chains = run_chains(normal, c, init, std::nullopt, 3, 2);
  const auto again = run_chains(normal, c, init, std::nullopt, 3, 1);
  REQUIRE(chains.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(chains[static_cast<std::size_t>(k)].draws == again[static_cast<std::size_t>(k)].draws);
  CHECK(chains[0].draws != chains[1].draws);
}

TEST_CASE("windowed adaptation and thinning") {
  const LogTarget normal = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  MCMCConfig c = small_config(10000, 21);
  c.adapt_window = 2000;
  c.thin = 7;
  const Chain chain = run_adaptive_mh(normal, c, Vector::Zero(3));
  CHECK(chain.size() == (c.iterations - c.burn_in) / 7);
  CHECK(chain.proposal_cov_final.diagonal().minCoeff() > 0.5);
}

TEST_CASE("config validation") {
  MCMCConfig c;
  c.thin = 0;
  CHECK_THROWS_AS(c.validate(3), ValidationError);
  c = MCMCConfig{};
  c.burn_in = c.iterations;
  CHECK_THROWS_AS(c.validate(3), ValidationError);
  c = MCMCConfig{};
  c.adapt_start = 4;
  CHECK_THROWS_AS(c.validate(3), ValidationError);
  CHECK_NOTHROW(MCMCConfig{}.validate(23));
  CHECK(MCMCConfig::paper_scale().retained() == 3000);

  const LogTarget bad = [](const Vector&) { return -std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(run_adaptive_mh(bad, MCMCConfig{}, Vector::Zero(2)), NumericError);
}

TEST_CASE("stuck chains are reported") {
  // Proposal far too wide for a narrow target.
  const LogTarget narrow = [](const Vector& x) { return -0.5 * x.squaredNorm() / 1e-12; };
  MCMCConfig c = small_config(3000, 2);
  c.adapt_start = 100000;
  const Chain chain = run_adaptive_mh(narrow, c, Vector::Zero(1), Matrix::Constant(1, 1, 1e6));
  CHECK_FALSE(chain.warnings.empty());
}
