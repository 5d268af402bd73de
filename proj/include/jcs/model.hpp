#ifndef JCS_MODEL_HPP
#define JCS_MODEL_HPP

// Shared gamma-frailty model for current count (N(U)) and current status
// (delta = 1{T <= U}) data. Baselines are parameterized on the grid of
// distinct monitoring times 0 = v_0 < v_1 < ... < v_n':
//
//   Lambda10(t) = sum_d exp(phi*_d) * (min(v_d, t) - min(v_{d-1}, t))   piecewise linear
//   Lambda20(t) = sum_{d: v_d <= t} exp(nu_d)                           right-continuous step
//
// and the frailty omega ~ Gamma(mean 1, variance psi = exp(psi*)) is integrated
// out in closed form.

#include "jcs/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace jcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Observation {
  double u = 0.0;     // monitoring time
  int delta = 0;      // 1 if the non-recurring event happened by u
  long n_count = 0;   // recurring events by u
  Vector x1;          // covariates of the count process (length p)
  Vector x2;          // covariates of the event time (length q)
};

/// Observations plus the monitoring grid the baselines live on. Every u must
/// be a grid point; the grid may contain extra (unobserved) points.
class Dataset {
 public:
  Dataset(std::vector<Observation> observations, Vector grid, Index p, Index q);

  /// Grid = sorted distinct u values.
  static Dataset with_inferred_grid(std::vector<Observation> observations, Index p, Index q);

  std::size_t size() const noexcept { return observations_.size(); }
  Index n_prime() const noexcept { return grid_.size(); }
  Index p() const noexcept { return p_; }
  Index q() const noexcept { return q_; }
  const Vector& grid() const noexcept { return grid_; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }
  /// Position of observation i's u in the grid.
  Index grid_index(std::size_t i) const { return grid_index_[i]; }

 private:
  std::vector<Observation> observations_;
  Vector grid_;
  Index p_;
  Index q_;
  std::vector<Index> grid_index_;
};

/// Offsets of the blocks (phi*, nu, beta1, beta2, psi*) inside a flat parameter vector.
struct ParamLayout {
  Index n_prime = 0;
  Index p = 0;
  Index q = 0;

  Index dim() const noexcept { return 2 * n_prime + p + q + 1; }
  Index phi_offset() const noexcept { return 0; }
  Index nu_offset() const noexcept { return n_prime; }
  Index beta1_offset() const noexcept { return 2 * n_prime; }
  Index beta2_offset() const noexcept { return 2 * n_prime + p; }
  Index psi_offset() const noexcept { return 2 * n_prime + p + q; }

  /// Column labels: phi_star_1.., nu_1.., beta1_1.., beta2_1.., psi_star.
  std::vector<std::string> labels() const;
  /// Block name owning flat coordinate k.
  std::string block_of(Index k) const;

  static ParamLayout of(const Dataset& data) { return {data.n_prime(), data.p(), data.q()}; }
  bool operator==(const ParamLayout&) const = default;
};

/// Working-scale parameter vector Theta* = (phi*, nu, beta1, beta2, psi*).
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(ParamLayout layout) : layout_(layout), flat_(Vector::Zero(layout.dim())) {}
  ParamVector(ParamLayout layout, Vector flat);
  ParamVector(const Vector& phi_star, const Vector& nu, const Vector& beta1, const Vector& beta2,
              double psi_star);

  const ParamLayout& layout() const noexcept { return layout_; }
  const Vector& flat() const noexcept { return flat_; }
  Vector& flat() noexcept { return flat_; }

  auto phi_star() const { return flat_.segment(layout_.phi_offset(), layout_.n_prime); }
  auto nu() const { return flat_.segment(layout_.nu_offset(), layout_.n_prime); }
  auto beta1() const { return flat_.segment(layout_.beta1_offset(), layout_.p); }
  auto beta2() const { return flat_.segment(layout_.beta2_offset(), layout_.q); }
  double psi_star() const { return flat_(layout_.psi_offset()); }

  auto phi_star() { return flat_.segment(layout_.phi_offset(), layout_.n_prime); }
  auto nu() { return flat_.segment(layout_.nu_offset(), layout_.n_prime); }
  auto beta1() { return flat_.segment(layout_.beta1_offset(), layout_.p); }
  auto beta2() { return flat_.segment(layout_.beta2_offset(), layout_.q); }
  double& psi_star() { return flat_(layout_.psi_offset()); }

 private:
  ParamLayout layout_;
  Vector flat_;
};

/// Posterior-mean baseline summaries: rates phi_hat (natural scale) and jump logs nu_hat.
struct BaselineEstimates {
  Vector grid;
  Vector phi_hat;
  Vector nu_hat;
};

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  if (x > Scalar(35)) return x + log1p(exp(-x));
  return log1p(exp(x));
}

// log(1 - exp(-r)) for r >= 0.
template <typename Scalar>
Scalar log1mexp(Scalar r) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  if (r <= Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
  if (r < Scalar(0.693147180559945309417)) return log(-expm1(-r));
  return log1p(-exp(-r));
}

template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
  using std::exp;
  using std::log1p;
  if (a < b) std::swap(a, b);
  if (a == -std::numeric_limits<Scalar>::infinity()) return a;
  return a + log1p(exp(b - a));
}

// log Gamma(a + n) - log Gamma(a). Small n uses the rising factorial, which
// stays accurate when a = 1/psi is huge.
template <typename Scalar>
Scalar log_gamma_ratio(Scalar a, long n) {
  using std::lgamma;
  using std::log;
  if (n <= 64) {
    Scalar acc(0);
    for (long k = 0; k < n; ++k) acc += log(a + Scalar(k));
    return acc;
  }
  return lgamma(a + Scalar(n)) - lgamma(a);
}

}  // namespace detail

/// Delta_d(t) = min(v_d, t) - min(v_{d-1}, t), d = 1..n'.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> delta_increments(
    typename Derived::Scalar t, const Eigen::MatrixBase<Derived>& grid) {
  using Scalar = typename Derived::Scalar;
  using std::min;
  if (!(t >= Scalar(0))) throw DomainError("delta_increments: time must be non-negative");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(grid.size());
  Scalar prev(0);
  for (Index d = 0; d < grid.size(); ++d) {
    out(d) = min(grid(d), t) - min(prev, t);
    prev = grid(d);
  }
  return out;
}

template <typename DerivedPhi, typename DerivedGrid>
typename DerivedPhi::Scalar eval_lambda10(const Eigen::MatrixBase<DerivedPhi>& phi_star,
                                          const Eigen::MatrixBase<DerivedGrid>& grid,
                                          typename DerivedPhi::Scalar t) {
  return phi_star.array().exp().matrix().dot(delta_increments(t, grid));
}

template <typename DerivedNu, typename DerivedGrid>
typename DerivedNu::Scalar eval_lambda20(const Eigen::MatrixBase<DerivedNu>& nu,
                                         const Eigen::MatrixBase<DerivedGrid>& grid,
                                         typename DerivedNu::Scalar t) {
  using Scalar = typename DerivedNu::Scalar;
  using std::exp;
  if (!(t >= Scalar(0))) throw DomainError("eval_lambda20: time must be non-negative");
  Scalar acc(0);
  for (Index d = 0; d < grid.size() && grid(d) <= t; ++d) acc += exp(nu(d));
  return acc;
}

/// Log of one subject's frailty-integrated likelihood factor, given the
/// baseline values at its monitoring time and the two linear predictors.
/// The Poisson N! is dropped (constant in the parameters).
template <typename Scalar>
Scalar log_likelihood_kernel(Scalar lambda10, Scalar lambda20, Scalar eta1, Scalar eta2,
                             Scalar psi_star, long n_count, int delta) {
  using std::exp;
  using std::isfinite;
  using std::log;
  constexpr Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();

  if (!isfinite(eta1)) throw NumericError("non-finite linear predictor", "beta1");
  if (!isfinite(eta2)) throw NumericError("non-finite linear predictor", "beta2");
  if (!isfinite(lambda10)) throw NumericError("baseline mean overflow", "phi_star");
  if (!isfinite(lambda20)) throw NumericError("baseline cumulative hazard overflow", "nu");
  const Scalar psi = exp(psi_star);
  const Scalar inv_psi = exp(-psi_star);
  if (!isfinite(psi) || !isfinite(inv_psi) || psi == Scalar(0) || inv_psi == Scalar(0))
    throw NumericError("frailty variance out of range", "psi_star");

  const Scalar c = Scalar(n_count) + inv_psi;
  // log(psi * Lambda1) and log(psi * Lambda2)
  const Scalar s1 = lambda10 > Scalar(0) ? psi_star + log(lambda10) + eta1 : neg_inf;
  const Scalar s2 = lambda20 > Scalar(0) ? psi_star + log(lambda20) + eta2 : neg_inf;

  Scalar out = detail::log_gamma_ratio(inv_psi, n_count);
  if (n_count > 0) out += Scalar(n_count) * s1;
  if (delta == 0) {
    out -= c * detail::softplus(detail::log_add_exp(s1, s2));
  } else {
    // log(A^-c - B^-c) = -c log A + log(1 - (A/B)^c), A = 1 + psi L1, B = A + psi L2
    const Scalar log_a = detail::softplus(s1);
    const Scalar r = s2 == neg_inf ? Scalar(0) : c * detail::softplus(s2 - log_a);
    out += -c * log_a + detail::log1mexp(r);
  }
  return out;
}

/// Log of subject i's factor of the expected likelihood. Works for any u >= 0.
double log_likelihood_term(const ParamVector& theta, const Observation& obs, const Vector& grid);

/// Sum of the per-subject terms over the dataset.
double log_likelihood(const ParamVector& theta, const Dataset& data);

/// Per-subject terms, in dataset order.
Vector pointwise_log_likelihood(const ParamVector& theta, const Dataset& data);

/// Lambda1(t | x1) = Lambda10(t) exp(beta1' x1) using the baseline estimates.
double marginal_mean(double t, const Vector& x1, const BaselineEstimates& est, const Vector& beta1_hat);

/// S2(t | x2) = (1 + psi Lambda20(t) exp(beta2' x2))^(-1/psi).
double marginal_survival(double t, const Vector& x2, const BaselineEstimates& est,
                         const Vector& beta2_hat, double psi_hat);

}  // namespace jcs

#endif  // JCS_MODEL_HPP
