#include "jcs/model.hpp"

#include <algorithm>
#include <sstream>

namespace jcs {

namespace {

void validate_observation(const Observation& obs, Index p, Index q, std::size_t i) {
  auto fail = [i](const std::string& msg) {
    std::ostringstream os;
    os << "observation " << i << ": " << msg;
    throw ValidationError(os.str());
  };
  if (!(obs.u > 0.0) || !std::isfinite(obs.u)) fail("monitoring time u must be positive and finite");
  if (obs.delta != 0 && obs.delta != 1) fail("delta must be 0 or 1");
  if (obs.n_count < 0) fail("n_count must be non-negative");
  if (obs.x1.size() != p) fail("x1 length does not match p");
  if (obs.x2.size() != q) fail("x2 length does not match q");
  if (!obs.x1.allFinite() || !obs.x2.allFinite()) fail("covariates must be finite");
}

}  // namespace

Dataset::Dataset(std::vector<Observation> observations, Vector grid, Index p, Index q)
    : observations_(std::move(observations)), grid_(std::move(grid)), p_(p), q_(q) {
  if (observations_.empty()) throw ValidationError("dataset must contain at least one observation");
  if (grid_.size() < 1) throw ValidationError("monitoring grid must be non-empty");
  if (p_ < 0 || q_ < 0) throw ValidationError("covariate dimensions must be non-negative");
  for (Index d = 0; d < grid_.size(); ++d) {
    if (!(grid_(d) > 0.0) || !std::isfinite(grid_(d)))
      throw ValidationError("monitoring grid entries must be positive and finite");
    if (d > 0 && !(grid_(d) > grid_(d - 1)))
      throw ValidationError("monitoring grid must be strictly increasing");
  }
  grid_index_.reserve(observations_.size());
  const double* begin = grid_.data();
  const double* end = begin + grid_.size();
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const Observation& obs = observations_[i];
    validate_observation(obs, p_, q_, i);
    const double* it = std::lower_bound(begin, end, obs.u);
    if (it == end || *it != obs.u) {
      std::ostringstream os;
      os << "observation " << i << ": u = " << obs.u << " is not a point of the monitoring grid";
      throw ValidationError(os.str());
    }
    grid_index_.push_back(static_cast<Index>(it - begin));
  }
}

Dataset Dataset::with_inferred_grid(std::vector<Observation> observations, Index p, Index q) {
  std::vector<double> times;
  times.reserve(observations.size());
  for (const auto& o : observations) times.push_back(o.u);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  Vector grid = Eigen::Map<Vector>(times.data(), static_cast<Index>(times.size()));
  return Dataset(std::move(observations), std::move(grid), p, q);
}

std::vector<std::string> ParamLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(dim()));
  for (Index d = 1; d <= n_prime; ++d) out.push_back("phi_star_" + std::to_string(d));
  for (Index d = 1; d <= n_prime; ++d) out.push_back("nu_" + std::to_string(d));
  for (Index j = 1; j <= p; ++j) out.push_back("beta1_" + std::to_string(j));
  for (Index j = 1; j <= q; ++j) out.push_back("beta2_" + std::to_string(j));
  out.emplace_back("psi_star");
  return out;
}

std::string ParamLayout::block_of(Index k) const {
  if (k < nu_offset()) return "phi_star";
  if (k < beta1_offset()) return "nu";
  if (k < beta2_offset()) return "beta1";
  if (k < psi_offset()) return "beta2";
  return "psi_star";
}

ParamVector::ParamVector(ParamLayout layout, Vector flat) : layout_(layout), flat_(std::move(flat)) {
  if (flat_.size() != layout_.dim())
    throw ValidationError("parameter vector length does not match layout dimension");
}

ParamVector::ParamVector(const Vector& phi_star, const Vector& nu, const Vector& beta1,
                         const Vector& beta2, double psi_star)
    : layout_{phi_star.size(), beta1.size(), beta2.size()} {
  if (nu.size() != phi_star.size()) throw ValidationError("phi_star and nu must have equal length");
  flat_.resize(layout_.dim());
  flat_ << phi_star, nu, beta1, beta2, psi_star;
}

double log_likelihood_term(const ParamVector& theta, const Observation& obs, const Vector& grid) {
  const ParamLayout& lay = theta.layout();
  if (lay.n_prime != grid.size()) throw ValidationError("grid size does not match parameter layout");
  if (obs.x1.size() != lay.p || obs.x2.size() != lay.q)
    throw ValidationError("covariate lengths do not match parameter layout");
  const double l10 = eval_lambda10(theta.phi_star(), grid, obs.u);
  const double l20 = eval_lambda20(theta.nu(), grid, obs.u);
  return log_likelihood_kernel(l10, l20, theta.beta1().dot(obs.x1), theta.beta2().dot(obs.x2),
                               theta.psi_star(), obs.n_count, obs.delta);
}

Vector pointwise_log_likelihood(const ParamVector& theta, const Dataset& data) {
  const ParamLayout& lay = theta.layout();
  if (!(lay == ParamLayout::of(data)))
    throw ValidationError("parameter layout does not match dataset dimensions");

  // Baselines at every grid point via prefix sums; observations index into them.
  const Vector& grid = data.grid();
  const Index m = grid.size();
  Vector l10(m), l20(m);
  double acc10 = 0.0, acc20 = 0.0, prev = 0.0;
  for (Index d = 0; d < m; ++d) {
    acc10 += std::exp(theta.phi_star()(d)) * (grid(d) - prev);
    acc20 += std::exp(theta.nu()(d));
    l10(d) = acc10;
    l20(d) = acc20;
    prev = grid(d);
  }

  const auto beta1 = theta.beta1();
  const auto beta2 = theta.beta2();
  const double psi_star = theta.psi_star();
  Vector out(static_cast<Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& obs = data[i];
    const Index g = data.grid_index(i);
    try {
      out(static_cast<Index>(i)) = log_likelihood_kernel(l10(g), l20(g), beta1.dot(obs.x1),
                                                         beta2.dot(obs.x2), psi_star, obs.n_count,
                                                         obs.delta);
    } catch (NumericError& e) {
      throw e.with_observation(i);
    }
  }
  return out;
}

double log_likelihood(const ParamVector& theta, const Dataset& data) {
  return pointwise_log_likelihood(theta, data).sum();
}

double marginal_mean(double t, const Vector& x1, const BaselineEstimates& est, const Vector& beta1_hat) {
  const double baseline = est.phi_hat.dot(delta_increments(t, est.grid));
  return baseline * std::exp(beta1_hat.dot(x1));
}

double marginal_survival(double t, const Vector& x2, const BaselineEstimates& est,
                         const Vector& beta2_hat, double psi_hat) {
  if (!(psi_hat > 0.0)) throw DomainError("marginal_survival: psi must be positive");
  if (!(t >= 0.0)) throw DomainError("marginal_survival: time must be non-negative");
  double baseline = 0.0;
  for (Index d = 0; d < est.grid.size() && est.grid(d) <= t; ++d) baseline += std::exp(est.nu_hat(d));
  const double hazard = baseline * std::exp(beta2_hat.dot(x2));
  return std::exp(-std::log1p(psi_hat * hazard) / psi_hat);
}

}  // namespace jcs
