#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace collrates {

// Bad user input: malformed selectors, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A request outside what the solvers support (e.g. simple-decoder search for c > 15).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An integrand or strategy produced a non-finite value at a quadrature node.
class IntegrandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_gap)
      : std::runtime_error(what), iterations_(iterations), last_gap_(last_gap) {}

  int iterations() const noexcept { return iterations_; }
  double last_gap() const noexcept { return last_gap_; }

 private:
  int iterations_;
  double last_gap_;
};

// Every restart of a multistart search failed to make progress. Carries the
// best point seen so the caller can still inspect it.
class OptimizerStalled : public ConvergenceError {
 public:
  OptimizerStalled(const std::string& what, int iterations, double last_gap,
                   std::vector<double> best_theta, double best_rate_bits)
      : ConvergenceError(what, iterations, last_gap),
        best_theta_(std::move(best_theta)),
        best_rate_bits_(best_rate_bits) {}

  const std::vector<double>& best_theta() const noexcept { return best_theta_; }
  double best_rate_bits() const noexcept { return best_rate_bits_; }

 private:
  std::vector<double> best_theta_;
  double best_rate_bits_;
};

class DegenerateUpdate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace collrates
