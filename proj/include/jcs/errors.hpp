#ifndef JCS_ERRORS_HPP
#define JCS_ERRORS_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace jcs {

/// Argument outside the mathematical domain of an operation (negative time, rho outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input: data files, configs, dimension mismatches.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Floating-point failure during evaluation. Carries whatever context is known
/// at the throw site: the parameter block that overflowed, the observation
/// index, or the last finite iterate of an optimizer.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, std::string block = {})
      : std::runtime_error(what), block_(std::move(block)) {}

  const std::string& block() const noexcept { return block_; }
  const std::optional<std::size_t>& observation() const noexcept { return observation_; }
  const std::optional<Eigen::VectorXd>& last_iterate() const noexcept { return last_iterate_; }

  NumericError& with_observation(std::size_t i) {
    observation_ = i;
    return *this;
  }
  NumericError& with_iterate(Eigen::VectorXd x) {
    last_iterate_ = std::move(x);
    return *this;
  }

 private:
  std::string block_;
  std::optional<std::size_t> observation_;
  std::optional<Eigen::VectorXd> last_iterate_;
};

}  // namespace jcs

#endif  // JCS_ERRORS_HPP
