#include "support.hpp"

#include "jcs/estimation.hpp"

#include <doctest.h>

#include <cmath>

using namespace jcs;
using doctest::Approx;

TEST_CASE("posterior means on the natural scale") {
  const ParamLayout lay{2, 1, 1};
  Matrix draws = Matrix::Constant(5, lay.dim(), 0.25);
  Chain chain = test::make_chain(lay, draws);
  const BayesEstimates est = bayes_estimates(chain);
  CHECK(est.phi_hat(0) == std::exp(0.25));
  CHECK(est.nu_hat(1) == 0.25);
  CHECK(est.beta1_hat(0) == 0.25);

  Matrix two = Matrix::Zero(2, lay.dim());
  two(1, lay.psi_offset()) = std::log(3.0);
  CHECK(bayes_estimates(test::make_chain(lay, two)).psi_hat == Approx(2.0).epsilon(1e-15));
}

TEST_CASE("posterior mean of a simulated nu column") {
  Rng rng = make_rng(12);
  std::normal_distribution<double> z(-0.7, 0.4);
  const ParamLayout lay{1, 1, 1};
  Matrix draws = Matrix::Zero(10000, lay.dim());
  for (Index s = 0; s < draws.rows(); ++s) draws(s, lay.nu_offset()) = z(rng);
  const BayesEstimates est = bayes_estimates(test::make_chain(lay, draws));
  CHECK(std::abs(est.nu_hat(0) + 0.7) < 4.0 * 0.4 / 100.0);
}

TEST_CASE("baseline estimates from constant chains") {
  Matrix draws = Matrix::Zero(3, 5);
  const BaselineFit one = baseline_estimates(test::make_chain(ParamLayout{1, 1, 1}, draws), Vector::Ones(1));
  CHECK(one.lambda10(0.5) == Approx(0.5).epsilon(1e-15));

  const ParamLayout lay{2, 1, 1};
  Matrix d2 = Matrix::Zero(4, lay.dim());
  d2.col(lay.nu_offset()).setConstant(std::log(0.2));
  d2.col(lay.nu_offset() + 1).setConstant(std::log(0.3));
  const BaselineFit two = baseline_estimates(test::make_chain(lay, d2), Eigen::Vector2d(0.5, 1.0));
  CHECK(two.lambda20(1.0) == Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(baseline_estimates(test::make_chain(lay, d2), Vector::Ones(3)), ValidationError);
}

TEST_CASE("credible intervals") {
  Vector constant = Vector::Constant(50, 1.5);
  auto [lo, hi] = credible_interval(constant, 0.95);
  CHECK(lo == 1.5);
  CHECK(hi == 1.5);

  const Vector seq = Vector::LinSpaced(100, 1.0, 100.0);
  std::tie(lo, hi) = credible_interval(seq, 0.9);
  CHECK(lo == Approx(5.5).epsilon(1e-12));
  CHECK(hi == Approx(95.5).epsilon(1e-12));

  Rng rng = make_rng(2);
  std::normal_distribution<double> z;
  Vector normal(100000);
  for (Index i = 0; i < normal.size(); ++i) normal(i) = z(rng);
  std::tie(lo, hi) = credible_interval(normal, 0.95);
  CHECK(std::abs(lo + 1.959964) < 0.03);
  CHECK(std::abs(hi - 1.959964) < 0.03);

  CHECK_THROWS_AS(credible_interval(seq, 1.0), DomainError);
  CHECK(empirical_quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(empirical_quantile({3.0, 1.0, 2.0}, 0.0) == 1.0);
}

TEST_CASE("summary table") {
  const ParamLayout lay{2, 1, 1};
  const Dataset data({test::make_obs(0.5, 0, 1), test::make_obs(1.0, 1, 0)}, Eigen::Vector2d(0.5, 1.0), 1, 1);

  const Matrix constant = Matrix::Constant(20, lay.dim(), 0.1);
  const FitSummary fixed = summarize(test::make_chain(lay, constant), data);
  for (const auto& p : fixed.parameters) {
    CHECK(p.psd == 0.0);
    CHECK(p.lower == p.estimate);
    CHECK(p.upper == p.estimate);
  }
  CHECK(fixed.find("phi_1").estimate == std::exp(0.1));
  CHECK(fixed.find("psi").estimate == std::exp(0.1));
  CHECK(fixed.find("nu_2").estimate == 0.1);
  CHECK(fixed.find("beta2_1").estimate == 0.1);
  CHECK(fixed.s0 == 20);

  // A BCI excluding zero reads as a significant covariate.
  Rng rng = make_rng(4);
  std::normal_distribution<double> z;
  Matrix draws(4000, lay.dim());
  for (Index s = 0; s < draws.rows(); ++s)
    for (Index k = 0; k < lay.dim(); ++k) draws(s, k) = 0.1 * z(rng);
  draws.col(lay.beta1_offset()).array() += 0.6;
  const FitSummary fs = summarize(test::make_chain(lay, draws), data);
  const auto& b1 = fs.find("beta1_1");
  CHECK(b1.lower > 0.0);
  CHECK(b1.psd == Approx(0.1).epsilon(0.05));
  const auto& b2 = fs.find("beta2_1");
  CHECK(b2.lower < 0.0);
  CHECK(b2.upper > 0.0);
  CHECK_THROWS_AS(fs.find("gamma"), ValidationError);

  const Dataset other({test::make_obs(1.0, 0, 1)}, Vector::Ones(1), 1, 1);
  CHECK_THROWS_AS(summarize(test::make_chain(lay, draws), other), ValidationError);
}
