#include "jcs/sampler.hpp"

#include "jcs/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace jcs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gradient_step(double x) { return std::max(1e-5, 1e-5 * std::abs(x)); }
double hessian_step(double x) { return std::max(1e-4, 1e-4 * std::abs(x)); }

double eval_checked(const LogTarget& target, const Vector& x, const char* where) {
  const double f = target(x);
  if (std::isnan(f) || f == std::numeric_limits<double>::infinity())
    throw NumericError(std::string(where) + ": target is not finite").with_iterate(x);
  return f;
}

// Lower Cholesky factor of `cov`, adding jitter to the diagonal until it factors.
Matrix proposal_factor(const Matrix& cov, double jitter) {
  Matrix work = 0.5 * (cov + cov.transpose());
  double add = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Matrix> llt(work + add * Matrix::Identity(work.rows(), work.cols()));
    if (llt.info() == Eigen::Success && llt.matrixLLT().allFinite()) return llt.matrixL();
    add = add == 0.0 ? std::max(jitter, 1e-12) : add * 10.0;
  }
  throw NumericError("proposal covariance is not positive definite");
}

// Running weighted mean/covariance of visited states. A state repeated by
// rejections is folded in once with its multiplicity.
class StateMoments {
 public:
  explicit StateMoments(Index dim) : mean_(Vector::Zero(dim)), m2_(Matrix::Zero(dim, dim)) {}

  void add(const Vector& x, double w) {
    if (w <= 0.0) return;
    const double total = weight_ + w;
    const Vector d_old = x - mean_;
    mean_ += (w / total) * d_old;
    m2_.noalias() += w * d_old * (x - mean_).transpose();
    weight_ = total;
  }
  double weight() const { return weight_; }
  Matrix covariance() const { return m2_ / std::max(weight_ - 1.0, 1.0); }

 private:
  Vector mean_;
  Matrix m2_;
  double weight_ = 0.0;
};

}  // namespace

void MCMCConfig::validate(Index dim) const {
  auto fail = [](const std::string& m) { throw ValidationError("mcmc config: " + m); };
  if (iterations <= 0) fail("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) fail("burn_in must satisfy 0 <= burn_in < iterations");
  if (thin <= 0) fail("thin must be positive");
  if (retained() < 10) fail("(iterations - burn_in) / thin must be at least 10");
  if (adapt_interval <= 0) fail("adapt_interval must be positive");
  if (adapt_start <= 0) fail("adapt_start must be positive");
  if (adapt_start < 2 * dim)
    fail("adapt_start must be at least twice the parameter dimension (" + std::to_string(2 * dim) + ")");
  if (adapt_window && *adapt_window <= 1) fail("adapt_window must exceed 1");
  if (!(proposal_scale > 0.0) || !std::isfinite(proposal_scale)) fail("proposal_scale must be positive");
  if (!(jitter > 0.0) || !std::isfinite(jitter)) fail("jitter must be positive");
}

MCMCConfig MCMCConfig::paper_scale() {
  MCMCConfig c;
  c.iterations = 100000;
  c.burn_in = 10000;
  c.thin = 30;
  return c;
}

ParamVector Chain::draw(Index s) const {
  if (!layout) throw ValidationError("chain has no parameter layout");
  return ParamVector(*layout, draws.row(s).transpose());
}

Chain Chain::with_draws(Matrix new_draws) const {
  Chain out = *this;
  out.draws = std::move(new_draws);
  return out;
}

Vector numeric_gradient(const LogTarget& target, const Vector& x) {
  Vector g(x.size());
  Vector work = x;
  for (Index k = 0; k < x.size(); ++k) {
    const double h = gradient_step(x(k));
    work(k) = x(k) + h;
    const double fp = target(work);
    work(k) = x(k) - h;
    const double fm = target(work);
    work(k) = x(k);
    g(k) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix numeric_hessian(const LogTarget& target, const Vector& x) {
  const Index n = x.size();
  Matrix hess(n, n);
  Vector work = x;
  const double f0 = eval_checked(target, x, "numeric_hessian");
  Vector h(n);
  for (Index k = 0; k < n; ++k) h(k) = hessian_step(x(k));

  for (Index i = 0; i < n; ++i) {
    work(i) = x(i) + h(i);
    const double fp = target(work);
    work(i) = x(i) - h(i);
    const double fm = target(work);
    work(i) = x(i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
    for (Index j = 0; j < i; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          work(i) = x(i) + si * h(i);
          work(j) = x(j) + sj * h(j);
          acc += si * sj * target(work);
        }
      }
      work(i) = x(i);
      work(j) = x(j);
      hess(i, j) = hess(j, i) = acc / (4.0 * h(i) * h(j));
    }
  }
  if (!hess.allFinite()) throw NumericError("Hessian evaluation is not finite").with_iterate(x);
  return hess;
}

MapResult find_map(const LogTarget& target, const Vector& init, const MapOptions& options) {
  const Index n = init.size();
  Vector x = init;
  double f = target(x);
  if (!std::isfinite(f)) throw NumericError("find_map: target is not finite at the initial point").with_iterate(x);
  Vector g = numeric_gradient(target, x);
  if (!g.allFinite()) throw NumericError("find_map: gradient is not finite").with_iterate(x);

  // Inverse Hessian approximation of -f.
  Matrix h_inv = Matrix::Identity(n, n);
  bool fresh = true;
  MapResult result;

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance * (1.0 + std::abs(f))) {
      result.converged = true;
      break;
    }
    Vector dir = h_inv * g;
    double slope = g.dot(dir);
    if (!(slope > 0.0)) {
      h_inv.setIdentity();
      fresh = true;
      dir = g;
      slope = g.squaredNorm();
    }
    double step = fresh ? std::min(1.0, 1.0 / std::max(1e-12, g.lpNorm<Eigen::Infinity>())) : 1.0;

    bool moved = false;
    Vector x_new;
    double f_new = kNegInf;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = x + step * dir;
      f_new = target(x_new);
      if (std::isnan(f_new) || f_new == std::numeric_limits<double>::infinity())
        throw NumericError("find_map: target is not finite during line search").with_iterate(x);
      if (f_new >= f + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      if (fresh) break;  // no ascent possible along the gradient either
      h_inv.setIdentity();
      fresh = true;
      continue;
    }

    Vector g_new = numeric_gradient(target, x_new);
    if (!g_new.allFinite()) throw NumericError("find_map: gradient is not finite").with_iterate(x);
    const Vector s = x_new - x;
    const Vector y = g - g_new;  // gradient change of -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) h_inv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Matrix left = Matrix::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
      fresh = false;
    }
    const bool stalled = std::abs(f_new - f) <= 1e-15 * (1.0 + std::abs(f)) && s.norm() <= 1e-14 * (1.0 + x.norm());
    x = std::move(x_new);
    f = f_new;
    g = std::move(g_new);
    if (stalled) break;
  }

  result.point = x;
  result.value = f;
  result.gradient_norm = g.lpNorm<Eigen::Infinity>();
  result.iterations = iter;
  if (!result.converged) result.converged = result.gradient_norm <= 1e-4 * (1.0 + std::abs(f));
  return result;
}

MapResult find_map(const LogTarget& target, const std::vector<Vector>& starts, const MapOptions& options) {
  if (starts.empty()) throw ValidationError("find_map: at least one start is required");
  std::optional<MapResult> best;
  std::optional<NumericError> last_error;
  for (const Vector& s : starts) {
    try {
      MapResult r = find_map(target, s, options);
      if (!best || r.value > best->value) best = std::move(r);
    } catch (const NumericError& e) {
      last_error = e;
    }
  }
  if (!best) throw *last_error;
  return *best;
}

Matrix observed_information(const LogTarget& target, const Vector& at, double jitter) {
  const Matrix hess = numeric_hessian(target, at);
  const Matrix info = -0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
  if (eig.info() != Eigen::Success) throw NumericError("observed information eigen-decomposition failed");
  Vector cov_eigen(info.rows());
  for (Index k = 0; k < info.rows(); ++k) {
    // Non-positive curvature (flat or saddle direction): invert |lambda| instead.
    const double lambda = std::max(std::abs(eig.eigenvalues()(k)), 1e-300);
    cov_eigen(k) = std::max(1.0 / lambda, jitter);
  }
  Matrix cov = eig.eigenvectors() * cov_eigen.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (cov + cov.transpose());
}

Chain run_adaptive_mh(const LogTarget& target, const MCMCConfig& config, const Vector& init,
                      const std::optional<Matrix>& initial_proposal) {
  const Index dim = init.size();
  config.validate(dim);
  double f_cur = target(init);
  if (!std::isfinite(f_cur)) throw NumericError("run_adaptive_mh: target is not finite at the initial state").with_iterate(init);

  Matrix proposal = initial_proposal ? *initial_proposal : Matrix::Identity(dim, dim);
  if (proposal.rows() != dim || proposal.cols() != dim)
    throw ValidationError("initial proposal covariance has wrong dimensions");
  Matrix factor = proposal_factor(config.proposal_scale * proposal, config.jitter);

  Rng rng = make_rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Chain chain;
  chain.config = config;
  chain.draws.resize(config.retained(), dim);
  chain.labels.reserve(static_cast<std::size_t>(dim));
  for (Index k = 1; k <= dim; ++k) chain.labels.push_back("theta_" + std::to_string(k));
  chain.map_point = init;

  const double haario = 2.38 * 2.38 / static_cast<double>(dim);
  StateMoments moments(dim);
  double pending_weight = 1.0;  // multiplicity of the current state not yet in `moments`
  std::vector<Vector> window;
  std::size_t window_head = 0;
  if (config.adapt_window) window.reserve(static_cast<std::size_t>(*config.adapt_window));
  auto push_window = [&](const Vector& x) {
    if (!config.adapt_window) return;
    if (window.size() < static_cast<std::size_t>(*config.adapt_window)) {
      window.push_back(x);
    } else {
      window[window_head] = x;
      window_head = (window_head + 1) % window.size();
    }
  };
  push_window(init);

  Vector cur = init;
  Vector cand(dim), z(dim);
  long accepted_post = 0, proposed_post = 0, reject_streak = 0, stuck_events = 0;
  Index row = 0;

  for (long s = 1; s <= config.iterations; ++s) {
    for (Index k = 0; k < dim; ++k) z(k) = normal(rng);
    cand.noalias() = cur + factor * z;
    double f_cand = target(cand);
    if (std::isnan(f_cand)) f_cand = kNegInf;
    const double log_u = std::log(uniform(rng));
    const bool accept = log_u <= f_cand - f_cur;

    if (s > config.burn_in) {
      ++proposed_post;
      if (accept) ++accepted_post;
    }
    if (accept) {
      moments.add(cur, pending_weight);
      pending_weight = 1.0;
      cur = cand;
      f_cur = f_cand;
      reject_streak = 0;
    } else {
      pending_weight += 1.0;
      if (++reject_streak == config.adapt_interval) ++stuck_events;
    }
    push_window(cur);

    if (s >= config.adapt_start && (s - config.adapt_start) % config.adapt_interval == 0) {
      Matrix emp;
      if (config.adapt_window) {
        Matrix hist(static_cast<Index>(window.size()), dim);
        for (std::size_t r = 0; r < window.size(); ++r) hist.row(static_cast<Index>(r)) = window[r].transpose();
        const Matrix centered = hist.rowwise() - hist.colwise().mean();
        emp = (centered.transpose() * centered) / std::max<double>(static_cast<double>(hist.rows()) - 1.0, 1.0);
      } else {
        StateMoments snapshot = moments;
        snapshot.add(cur, pending_weight);
        emp = snapshot.covariance();
      }
      proposal = haario * emp + config.jitter * Matrix::Identity(dim, dim);
      factor = proposal_factor(config.proposal_scale * proposal, config.jitter);
    }

    if (s > config.burn_in && (s - config.burn_in) % config.thin == 0) chain.draws.row(row++) = cur.transpose();
  }

  chain.acceptance_rate = proposed_post > 0 ? static_cast<double>(accepted_post) / static_cast<double>(proposed_post) : 0.0;
  chain.proposal_cov_final = proposal;
  if (stuck_events > 0) {
    std::ostringstream os;
    os << "all proposals rejected for " << config.adapt_interval << " consecutive iterations (" << stuck_events
       << " time" << (stuck_events > 1 ? "s" : "") << ")";
    chain.warnings.push_back(os.str());
  }
  return chain;
}

Chain run_adaptive_mh(const LogTarget& target, const MCMCConfig& config, const ParamVector& init,
                      const std::optional<Matrix>& initial_proposal) {
  Chain chain = run_adaptive_mh(target, config, init.flat(), initial_proposal);
  chain.layout = init.layout();
  chain.labels = init.layout().labels();
  return chain;
}

std::vector<Chain> run_chains(const LogTarget& target, const MCMCConfig& config, const ParamVector& init,
                              const std::optional<Matrix>& initial_proposal, int n_chains, int jobs) {
  if (n_chains < 1) throw ValidationError("run_chains: need at least one chain");
  std::vector<std::optional<Chain>> out(static_cast<std::size_t>(n_chains));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (int k = next++; k < n_chains; k = next++) {
      try {
        MCMCConfig c = config;
        c.seed = stream_seed(config.seed, static_cast<std::uint64_t>(k));
        out[static_cast<std::size_t>(k)] = run_adaptive_mh(target, c, init, initial_proposal);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, n_chains);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  std::vector<Chain> chains;
  chains.reserve(out.size());
  for (auto& c : out) chains.push_back(std::move(*c));
  return chains;
}

}  // namespace jcs
