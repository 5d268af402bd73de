#ifndef JCS_TESTS_SUPPORT_HPP
#define JCS_TESTS_SUPPORT_HPP

#include "jcs/model.hpp"
#include "jcs/rng.hpp"
#include "jcs/sampler.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace jcs::test {

/// Frailty-integrated likelihood of one subject by adaptive quadrature:
///   int Gamma(w; 1/psi, 1/psi) (w mu1)^N e^{-w mu1} S(w) dw
/// with S = e^{-w mu2} (delta = 0) or 1 - e^{-w mu2} (delta = 1).
/// The Poisson 1/N! is left out, as in the closed form.
inline double oracle_likelihood(double lambda10, double lambda20, double eta1, double eta2, double psi, long n,
                                int delta) {
  const double mu1 = lambda10 * std::exp(eta1);
  const double mu2 = lambda20 * std::exp(eta2);
  const double k = 1.0 / psi;
  const double log_norm = k * std::log(k) - std::lgamma(k);
  auto f = [=](double w) -> double {
    if (!(w > 0.0) || !std::isfinite(w)) return 0.0;
    double log_f = log_norm + (k - 1.0) * std::log(w) - k * w - w * mu1;
    if (n > 0) log_f += static_cast<double>(n) * std::log(w * mu1);
    const double status = delta == 1 ? -std::expm1(-w * mu2) : std::exp(-w * mu2);
    return std::exp(log_f) * status;
  };
  const double tol = 1e-12;
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  return near.integrate(f, 0.0, 1.0, tol) + far.integrate(f, 1.0, std::numeric_limits<double>::infinity(), tol);
}

/// Lambda10 and Lambda20 by direct summation over the grid.
inline double naive_lambda10(const Vector& phi_star, const Vector& grid, double t) {
  double acc = 0.0, prev = 0.0;
  for (Index d = 0; d < grid.size(); ++d) {
    acc += std::exp(phi_star(d)) * (std::min(grid(d), t) - std::min(prev, t));
    prev = grid(d);
  }
  return acc;
}

inline double naive_lambda20(const Vector& nu, const Vector& grid, double t) {
  double acc = 0.0;
  for (Index d = 0; d < grid.size(); ++d)
    if (grid(d) <= t) acc += std::exp(nu(d));
  return acc;
}

struct OracleCase {
  ParamVector theta;
  Observation obs;
  Vector grid;
  double oracle = 0.0;
};

/// Random (theta, observation) pairs with n' <= 3 and p = q = 1.
inline std::vector<OracleCase> oracle_cases(int count, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<OracleCase> out;
  for (int c = 0; c < count; ++c) {
    const Index m = 1 + static_cast<Index>(rng() % 3);
    Vector grid(m);
    double t = 0.0;
    for (Index d = 0; d < m; ++d) grid(d) = (t += 0.1 + 0.9 * unit(rng));
    ParamVector theta(ParamLayout{m, 1, 1});
    for (Index d = 0; d < m; ++d) {
      theta.phi_star()(d) = -1.5 + 2.5 * unit(rng);
      theta.nu()(d) = -2.0 + 2.5 * unit(rng);
    }
    theta.beta1()(0) = -1.0 + 2.0 * unit(rng);
    theta.beta2()(0) = -1.0 + 2.0 * unit(rng);
    theta.psi_star() = -1.5 + 2.7 * unit(rng);

    Observation obs;
    obs.u = grid(static_cast<Index>(rng() % static_cast<std::uint64_t>(m)));
    obs.delta = static_cast<int>(rng() % 2);
    obs.n_count = static_cast<long>(rng() % 7);
    obs.x1 = Vector::Constant(1, (rng() % 2) ? 1.0 : -0.5 + unit(rng));
    obs.x2 = Vector::Constant(1, (rng() % 2) ? 1.0 : -0.5 + unit(rng));

    const double l10 = naive_lambda10(theta.phi_star(), grid, obs.u);
    const double l20 = naive_lambda20(theta.nu(), grid, obs.u);
    const double oracle = oracle_likelihood(l10, l20, theta.beta1()(0) * obs.x1(0), theta.beta2()(0) * obs.x2(0),
                                            std::exp(theta.psi_star()), obs.n_count, obs.delta);
    out.push_back({theta, obs, grid, oracle});
  }
  return out;
}

/// Grid (1.0), all parameters zero: Lambda10 = Lambda20 = psi = 1.
inline ParamVector unit_theta() { return ParamVector(ParamLayout{1, 1, 1}); }

inline Observation make_obs(double u, int delta, long n, double x1 = 0.0, double x2 = 0.0) {
  Observation o;
  o.u = u;
  o.delta = delta;
  o.n_count = n;
  o.x1 = Vector::Constant(1, x1);
  o.x2 = Vector::Constant(1, x2);
  return o;
}

inline Chain make_chain(const ParamLayout& layout, Matrix draws) {
  Chain c;
  c.draws = std::move(draws);
  c.layout = layout;
  c.labels = layout.labels();
  return c;
}

}  // namespace jcs::test

#endif  // JCS_TESTS_SUPPORT_HPP
