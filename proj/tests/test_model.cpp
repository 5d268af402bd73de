#include "support.hpp"

#include "jcs/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace jcs;
using doctest::Approx;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Dataset unit_dataset(std::vector<Observation> obs) { return Dataset(std::move(obs), vec({1.0}), 1, 1); }

}  // namespace

TEST_CASE("delta increments") {
  const Vector grid = vec({0.5, 1.0});
  CHECK(delta_increments(0.0, grid).isZero(0.0));
  const Vector mid = delta_increments(0.75, grid);
  CHECK(mid(0) == 0.5);
  CHECK(mid(1) == 0.25);
  const Vector past = delta_increments(2.0, grid);
  CHECK(past(0) == 0.5);
  CHECK(past(1) == 0.5);
  CHECK(past.sum() == 1.0);
  CHECK_THROWS_AS(delta_increments(-0.1, grid), DomainError);
}

TEST_CASE("piecewise linear baseline mean") {
  CHECK(eval_lambda10(vec({0.0, 0.0}), vec({0.5, 1.0}), 0.75) == Approx(0.75).epsilon(1e-15));
  CHECK(eval_lambda10(vec({std::log(2.0)}), vec({1.0}), 0.5) == Approx(1.0).epsilon(1e-15));

  const Vector grid = Vector::LinSpaced(10, 0.1, 1.0);
  Vector phi(10);
  double prev = 0.0;
  for (Index d = 0; d < 10; ++d) {
    phi(d) = std::log((std::pow(grid(d), 0.9) - std::pow(prev, 0.9)) / (grid(d) - prev));
    prev = grid(d);
  }
  for (Index d = 0; d < 10; ++d) CHECK(std::abs(eval_lambda10(phi, grid, grid(d)) - std::pow(grid(d), 0.9)) < 1e-12);
}

TEST_CASE("step baseline cumulative hazard") {
  const Vector nu = vec({std::log(0.2), std::log(0.3)});
  const Vector grid = vec({0.5, 1.0});
  CHECK(eval_lambda20(nu, grid, 0.75) == Approx(0.2).epsilon(1e-15));
  CHECK(eval_lambda20(nu, grid, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(eval_lambda20(nu, grid, 0.0) == 0.0);
}

TEST_CASE("closed-form likelihood terms") {
  const ParamVector theta = test::unit_theta();
  const Vector grid = vec({1.0});
  CHECK(std::abs(log_likelihood_term(theta, test::make_obs(1.0, 0, 0), grid) - std::log(1.0 / 3.0)) < 1e-12);
  CHECK(std::abs(log_likelihood_term(theta, test::make_obs(1.0, 1, 0), grid) - std::log(1.0 / 6.0)) < 1e-12);
  CHECK(std::abs(log_likelihood_term(theta, test::make_obs(1.0, 0, 1), grid) - std::log(1.0 / 9.0)) < 1e-12);
}

TEST_CASE("likelihood matches quadrature over the gamma frailty") {
  for (const auto& c : test::oracle_cases(40, 97)) {
    const double closed = std::exp(log_likelihood_term(c.theta, c.obs, c.grid));
    CAPTURE(c.obs.n_count);
    CAPTURE(c.obs.delta);
    CAPTURE(c.theta.psi_star());
    CHECK(std::abs(closed - c.oracle) <= 1e-6 * c.oracle);
  }
}

TEST_CASE("kernel agrees in long double") {
  for (const auto& c : test::oracle_cases(20, 5)) {
    const double l10 = test::naive_lambda10(c.theta.phi_star(), c.grid, c.obs.u);
    const double l20 = test::naive_lambda20(c.theta.nu(), c.grid, c.obs.u);
    const double eta1 = c.theta.beta1()(0) * c.obs.x1(0);
    const double eta2 = c.theta.beta2()(0) * c.obs.x2(0);
    const double d = log_likelihood_kernel<double>(l10, l20, eta1, eta2, c.theta.psi_star(), c.obs.n_count, c.obs.delta);
    const long double ld = log_likelihood_kernel<long double>(l10, l20, eta1, eta2, c.theta.psi_star(),
                                                               c.obs.n_count, c.obs.delta);
    CHECK(std::abs(d - static_cast<double>(ld)) < 1e-12 * (1.0 + std::abs(d)));
  }
}

TEST_CASE("status and count probabilities sum to one") {
  // Sum over N of P(N, delta) with 1/N! restored is 1.
  const Vector grid = vec({0.4, 1.0});
  ParamVector theta(ParamLayout{2, 1, 1});
  theta.phi_star() << -0.3, 0.2;
  theta.nu() << -1.0, -0.4;
  theta.beta1()(0) = 0.5;
  theta.beta2()(0) = -0.3;
  theta.psi_star() = std::log(0.7);
  double total = 0.0;
  for (long n = 0; n < 200; ++n)
    for (int delta = 0; delta < 2; ++delta)
      total += std::exp(log_likelihood_term(theta, test::make_obs(1.0, delta, n, 1.0, 1.0), grid) - std::lgamma(n + 1.0));
  CHECK(total == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("large and small frailty variance stay finite") {
  const Vector grid = vec({1.0});
  for (double psi_star : {-30.0, -12.0, 0.0, 8.0}) {
    ParamVector theta = test::unit_theta();
    theta.psi_star() = psi_star;
    for (int delta = 0; delta < 2; ++delta)
      for (long n : {0L, 3L, 80L}) CHECK(std::isfinite(log_likelihood_term(theta, test::make_obs(1.0, delta, n), grid)));
  }
  // psi -> 0: Poisson times exp(-L2) or 1 - exp(-L2).
  ParamVector theta = test::unit_theta();
  theta.psi_star() = std::log(1e-9);
  CHECK(log_likelihood_term(theta, test::make_obs(1.0, 0, 2), grid) == Approx(-2.0).epsilon(1e-7));
  CHECK(log_likelihood_term(theta, test::make_obs(1.0, 1, 0), grid) == Approx(std::log(-std::expm1(-1.0)) - 1.0).epsilon(1e-7));
}

TEST_CASE("overflow is reported with the offending block") {
  ParamVector theta = test::unit_theta();
  theta.beta1()(0) = 1e308;
  try {
    log_likelihood_term(theta, test::make_obs(1.0, 0, 1, 10.0, 0.0), vec({1.0}));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.block() == "beta1");
  }
  theta = test::unit_theta();
  theta.psi_star() = 1e4;
  CHECK_THROWS_AS(log_likelihood_term(theta, test::make_obs(1.0, 0, 0), vec({1.0})), NumericError);
}

TEST_CASE("dataset likelihood is additive") {
  const ParamVector theta = test::unit_theta();
  const Observation a = test::make_obs(1.0, 0, 0), b = test::make_obs(1.0, 1, 0), c = test::make_obs(1.0, 0, 1);
  CHECK(log_likelihood(theta, unit_dataset({a})) == log_likelihood_term(theta, a, vec({1.0})));
  const double three = log_likelihood(theta, unit_dataset({a, b, c}));
  CHECK(std::abs(three - (std::log(1.0 / 3) + std::log(1.0 / 6) + std::log(1.0 / 9))) < 1e-12);
  CHECK(log_likelihood(theta, unit_dataset({a, b, c, a, b, c, a, b, c})) == Approx(3.0 * three).epsilon(1e-14));

  // Prefix-sum path agrees with the per-observation path on a random dataset.
  for (const auto& cs : test::oracle_cases(5, 11)) {
    std::vector<Observation> obs;
    for (Index d = 0; d < cs.grid.size(); ++d) obs.push_back(test::make_obs(cs.grid(d), d % 2, d + 1, 1.0, 0.3));
    const Dataset data(obs, cs.grid, 1, 1);
    const Vector pw = pointwise_log_likelihood(cs.theta, data);
    for (std::size_t i = 0; i < obs.size(); ++i)
      CHECK(pw(static_cast<Index>(i)) == Approx(log_likelihood_term(cs.theta, obs[i], cs.grid)).epsilon(1e-13));
  }
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset({test::make_obs(0.5, 0, 0)}, vec({1.0}), 1, 1), ValidationError);
  CHECK_THROWS_AS(Dataset({test::make_obs(1.0, 2, 0)}, vec({1.0}), 1, 1), ValidationError);
  CHECK_THROWS_AS(Dataset({test::make_obs(1.0, 0, -1)}, vec({1.0}), 1, 1), ValidationError);
  CHECK_THROWS_AS(Dataset({test::make_obs(1.0, 0, 0)}, vec({1.0, 0.5}), 1, 1), ValidationError);
  CHECK_THROWS_AS(Dataset({test::make_obs(1.0, 0, 0)}, vec({1.0}), 2, 1), ValidationError);
  const Dataset d = Dataset::with_inferred_grid({test::make_obs(0.3, 0, 0), test::make_obs(0.1, 1, 2),
                                                 test::make_obs(0.3, 1, 1)}, 1, 1);
  CHECK(d.n_prime() == 2);
  CHECK(d.grid()(0) == 0.1);
  CHECK(d.grid_index(0) == 1);
}

TEST_CASE("marginal mean and survival") {
  BaselineEstimates est{vec({0.5, 1.0}), vec({1.0, 2.0}), vec({std::log(0.2), std::log(0.8)})};
  const Vector zero = Vector::Zero(1);
  CHECK(marginal_mean(0.75, zero, est, zero) == Approx(1.0).epsilon(1e-15));
  CHECK(marginal_mean(0.0, zero, est, zero) == 0.0);
  CHECK(marginal_mean(0.75, Vector::Ones(1), est, Vector::Constant(1, std::log(2.0))) == Approx(2.0).epsilon(1e-15));

  CHECK(marginal_survival(0.25, zero, est, zero, 1.0) == 1.0);
  CHECK(marginal_survival(1.0, zero, est, zero, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(marginal_survival(1.0, zero, est, zero, 1e-8) - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("parameter layout") {
  const ParamLayout lay{3, 2, 1};
  CHECK(lay.dim() == 10);
  const auto labels = lay.labels();
  CHECK(labels.front() == "phi_star_1");
  CHECK(labels[3] == "nu_1");
  CHECK(labels[6] == "beta1_1");
  CHECK(labels[8] == "beta2_1");
  CHECK(labels.back() == "psi_star");
  CHECK(lay.block_of(7) == "beta1");
}
