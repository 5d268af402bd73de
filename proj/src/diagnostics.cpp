#include "jcs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jcs {

namespace {

const ParamLayout& checked_layout(const Chain& chain, const Dataset& data) {
  if (chain.size() == 0) throw ValidationError("chain is empty");
  if (!chain.layout) throw ValidationError("chain has no parameter layout");
  if (!(*chain.layout == ParamLayout::of(data)))
    throw ValidationError("chain dimensions do not match the dataset (n', p, q)");
  return *chain.layout;
}

// Mean pivoted on the first value so that constant inputs reproduce it exactly.
double pivot_mean(const Eigen::Ref<const Vector>& x) {
  const double pivot = x(0);
  return pivot + (x.array() - pivot).mean();
}

}  // namespace

double deviance(const ParamVector& theta, const Dataset& data) { return -2.0 * log_likelihood(theta, data); }

Matrix pointwise_log_likelihood(const Chain& chain, const Dataset& data) {
  checked_layout(chain, data);
  Matrix out(chain.size(), static_cast<Index>(data.size()));
  for (Index s = 0; s < chain.size(); ++s) out.row(s) = pointwise_log_likelihood(chain.draw(s), data).transpose();
  return out;
}

DicResult dic(const Chain& chain, const Dataset& data) {
  const ParamLayout& lay = checked_layout(chain, data);
  Vector dev(chain.size());
  for (Index s = 0; s < chain.size(); ++s) dev(s) = deviance(chain.draw(s), data);
  Vector mean_theta(lay.dim());
  for (Index k = 0; k < lay.dim(); ++k) mean_theta(k) = pivot_mean(chain.draws.col(k));

  DicResult r;
  r.dev_bar = pivot_mean(dev);
  r.dev_at_mean = deviance(ParamVector(lay, mean_theta), data);
  r.p_d = r.dev_bar - r.dev_at_mean;
  r.dic = r.dev_at_mean + 2.0 * r.p_d;
  if (r.p_d < 0.0) r.warnings.emplace_back("negative effective number of parameters p_D; check chain mixing");
  return r;
}

Vector log_cpo(const Matrix& pointwise) {
  if (pointwise.rows() == 0) throw ValidationError("log_cpo: no draws");
  Vector out(pointwise.cols());
  for (Index i = 0; i < pointwise.cols(); ++i) {
    const Vector neg = -pointwise.col(i);
    const double top = neg.maxCoeff();
    if (!std::isfinite(top)) {
      std::ostringstream os;
      os << "CPO of subject " << i << " is not computable (likelihood term is zero or non-finite)";
      throw NumericError(os.str()).with_observation(static_cast<std::size_t>(i));
    }
    out(i) = -(top + std::log((neg.array() - top).exp().mean()));
  }
  return out;
}

Vector kl_from_pointwise(const Matrix& pointwise, const Vector& log_cpo_values) {
  if (log_cpo_values.size() != pointwise.cols()) throw ValidationError("CPO vector does not match subjects");
  Vector out(pointwise.cols());
  for (Index i = 0; i < pointwise.cols(); ++i) {
    double v = -log_cpo_values(i) + pivot_mean(pointwise.col(i));
    if (v < 0.0 && v > -1e-10) v = 0.0;
    out(i) = v;
  }
  return out;
}

Vector cpo(const Chain& chain, const Dataset& data) {
  const Vector lc = log_cpo(pointwise_log_likelihood(chain, data));
  Vector out = lc.array().exp();
  for (Index i = 0; i < out.size(); ++i) {
    if (!(out(i) > 0.0)) {
      std::ostringstream os;
      os << "CPO of subject " << i << " underflows (log CPO = " << lc(i) << ")";
      throw NumericError(os.str()).with_observation(static_cast<std::size_t>(i));
    }
  }
  return out;
}

double lpml(const Vector& cpo_values) {
  if ((cpo_values.array() <= 0.0).any() || cpo_values.hasNaN()) throw DomainError("lpml: CPO values must be positive");
  return cpo_values.array().log().sum();
}

KlResult kl_influence(const Chain& chain, const Dataset& data, const Vector& cpo_values) {
  if (cpo_values.size() != static_cast<Index>(data.size())) throw ValidationError("CPO vector does not match subjects");
  if ((cpo_values.array() <= 0.0).any()) throw DomainError("kl_influence: CPO values must be positive");
  const Matrix pw = pointwise_log_likelihood(chain, data);
  const Vector lc = log_cpo(pw);
  for (Index i = 0; i < lc.size(); ++i)
    if (std::abs(std::log(cpo_values(i)) - lc(i)) > 1e-8 * (1.0 + std::abs(lc(i))))
      throw ValidationError("kl_influence: CPO values were not computed from this chain and dataset");
  KlResult r;
  r.kl = kl_from_pointwise(pw, lc);
  r.influential.resize(static_cast<std::size_t>(r.kl.size()));
  for (Index i = 0; i < r.kl.size(); ++i) r.influential[static_cast<std::size_t>(i)] = r.kl(i) > kInfluenceThreshold;
  return r;
}

std::size_t InfluenceReport::influential_count() const {
  return static_cast<std::size_t>(std::count(influential.begin(), influential.end(), true));
}

InfluenceReport influence_report(const Chain& chain, const Dataset& data) {
  const Matrix pw = pointwise_log_likelihood(chain, data);
  InfluenceReport r;
  r.log_cpo = log_cpo(pw);
  r.cpo = r.log_cpo.array().exp();
  for (Index i = 0; i < r.cpo.size(); ++i) {
    if (!(r.cpo(i) > 0.0)) {
      std::ostringstream os;
      os << "CPO of subject " << i << " underflows (log CPO = " << r.log_cpo(i) << ")";
      throw NumericError(os.str()).with_observation(static_cast<std::size_t>(i));
    }
  }
  r.lpml = lpml(r.cpo);
  r.kl = kl_from_pointwise(pw, r.log_cpo);
  r.influential.resize(static_cast<std::size_t>(r.kl.size()));
  for (Index i = 0; i < r.kl.size(); ++i) r.influential[static_cast<std::size_t>(i)] = r.kl(i) > kInfluenceThreshold;

  const DicResult d = dic(chain, data);
  r.dic = d.dic;
  r.p_d = d.p_d;
  r.dev_bar = d.dev_bar;
  r.dev_at_mean = d.dev_at_mean;
  r.warnings = d.warnings;
  return r;
}

Vector gelman_rubin(const std::vector<Matrix>& chains) {
  if (chains.size() < 2) throw ValidationError("gelman_rubin: need at least two chains");
  const Index n = chains.front().rows();
  const Index dim = chains.front().cols();
  if (n < 2) throw ValidationError("gelman_rubin: chains need at least two draws");
  for (const auto& c : chains)
    if (c.rows() != n || c.cols() != dim) throw ValidationError("gelman_rubin: chains must have equal lengths");

  const double m = static_cast<double>(chains.size());
  const double nn = static_cast<double>(n);
  Vector out(dim);
  for (Index k = 0; k < dim; ++k) {
    Vector means(static_cast<Index>(chains.size()));
    double w = 0.0;
    for (std::size_t j = 0; j < chains.size(); ++j) {
      const auto col = chains[j].col(k);
      const double mu = col.mean();
      means(static_cast<Index>(j)) = mu;
      w += (col.array() - mu).square().sum() / (nn - 1.0);
    }
    w /= m;
    const double b = nn * (means.array() - means.mean()).square().sum() / (m - 1.0);
    const double v = (nn - 1.0) / nn * w + b / nn;
    if (w > 0.0)
      out(k) = std::sqrt(v / w);
    else
      out(k) = b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return out;
}

Vector gelman_rubin(const std::vector<Chain>& chains) {
  std::vector<Matrix> draws;
  draws.reserve(chains.size());
  for (const auto& c : chains) draws.push_back(c.draws);
  return gelman_rubin(draws);
}

EssAcf ess_and_acf(const Vector& x, Index max_lag) {
  const Index n = x.size();
  if (max_lag < 1 || n <= max_lag) throw ValidationError("ess_and_acf: need s0 > max_lag >= 1");
  const Vector c = x.array() - x.mean();
  const double c0 = c.squaredNorm() / static_cast<double>(n);

  EssAcf r;
  r.acf = Vector::Zero(max_lag + 1);
  r.acf(0) = 1.0;
  if (!(c0 > 0.0) || x.minCoeff() == x.maxCoeff()) {
    r.ess = static_cast<double>(n);
    r.zero_variance = true;
    return r;
  }
  auto rho = [&](Index k) { return c.head(n - k).dot(c.tail(n - k)) / (static_cast<double>(n) * c0); };
  for (Index k = 1; k <= max_lag; ++k) r.acf(k) = rho(k);

  // Initial positive sequence: sum pairs Gamma_m = rho_2m + rho_2m+1 while positive.
  double tau = -1.0;
  for (Index m = 0; 2 * m + 1 < n; ++m) {
    const Index a = 2 * m, b = 2 * m + 1;
    const double ra = a <= max_lag ? r.acf(a) : rho(a);
    const double rb = b <= max_lag ? r.acf(b) : rho(b);
    const double gamma = ra + rb;
    if (!(gamma > 0.0)) break;
    tau += 2.0 * gamma;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  r.ess = static_cast<double>(n) / tau;
  return r;
}

ConvergenceReport convergence_report(const std::vector<Chain>& chains, Index max_lag) {
  if (chains.empty()) throw ValidationError("convergence_report: no chains");
  const Index dim = chains.front().dim();
  for (const auto& c : chains)
    if (c.dim() != dim || c.size() != chains.front().size())
      throw ValidationError("convergence_report: chains must share dimensions and length");
  const Index lag = std::min<Index>(max_lag, chains.front().size() - 1);

  ConvergenceReport rep;
  Vector psrf = Vector::Constant(dim, std::numeric_limits<double>::quiet_NaN());
  if (chains.size() >= 2) psrf = gelman_rubin(chains);
  for (Index k = 0; k < dim; ++k) {
    ConvergenceRow row;
    row.label = chains.front().labels.at(static_cast<std::size_t>(k));
    row.psrf = psrf(k);
    for (std::size_t j = 0; j < chains.size(); ++j) {
      const EssAcf ea = ess_and_acf(chains[j].draws.col(k), lag);
      row.ess += ea.ess;
      if (j == 0) row.acf = ea.acf;
      if (ea.zero_variance) rep.warnings.push_back("zero variance in column " + row.label);
    }
    rep.rows.push_back(std::move(row));
  }
  for (const auto& c : chains) {
    rep.acceptance_rates.push_back(c.acceptance_rate);
    rep.warnings.insert(rep.warnings.end(), c.warnings.begin(), c.warnings.end());
  }
  return rep;
}

}  // namespace jcs
