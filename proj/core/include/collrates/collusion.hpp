#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collrates/error.hpp"

namespace collrates {

inline constexpr int kMaxCollusionSize = 200;
// Entry-wise tolerance for marking-assumption and class-tag checks.
inline constexpr double kChannelTolerance = 1e-9;

enum class ClassTag { A, B, C, D };

ClassTag parse_class_tag(std::string_view tag);
std::string_view to_string(ClassTag tag);

// C(n, k). Exact integer arithmetic up to n = 50, log-gamma beyond.
double binomial(int n, int k);

// Pr(Sigma = sigma | P = p) = C(c, sigma) p^sigma (1 - p)^(c - sigma).
double bernstein(int c, int sigma, double p);

// All c + 1 Bernstein values at p.
std::vector<double> bernstein_row(int c, double p);

// theta[sigma] = Pr(Y = 1 | Sigma = sigma) for a memoryless, permutation
// invariant attack by c colluders. Construction enforces theta[0] = 0,
// theta[c] = 1 and theta in [0, 1]; entries within kChannelTolerance of a
// bound are snapped onto it.
class CollusionChannel {
 public:
  explicit CollusionChannel(std::vector<double> theta);

  static CollusionChannel class_a(int c);
  // "0,0.34,0.66,1"
  static CollusionChannel parse(std::string_view text);

  int c() const noexcept { return static_cast<int>(theta_.size()) - 1; }
  std::span<const double> theta() const noexcept { return theta_; }
  double operator[](int sigma) const { return theta_[static_cast<std::size_t>(sigma)]; }

  bool is_class_a(double tol = kChannelTolerance) const;
  bool is_class_b(double tol = kChannelTolerance) const;

  // Shortest round-trip representation, comma separated.
  std::string to_string() const;
  // Fixed number of decimals, for tables.
  std::string to_string(int decimals) const;

 private:
  std::vector<double> theta_;
};

// Pr(Y = 1 | P = p).
double prob_y1(const CollusionChannel& ch, double p);

// d/dp Pr(Y = 1 | P = p), from the Bernstein derivative
// c * sum_sigma (theta[sigma + 1] - theta[sigma]) B_{c-1, sigma}(p).
double prob_y1_derivative(const CollusionChannel& ch, double p);

// Pr(Y = 1 | X = x, P = p) for one colluder's symbol x.
double prob_y1_given_x(const CollusionChannel& ch, int x, double p);

// Pr(Sigma = . | X = 1, P = p) and Pr(Sigma = . | X = 0, P = p), c + 1 entries each.
std::vector<double> q_sigma1(int c, double p);
std::vector<double> q_sigma0(int c, double p);

// rho_i(p) = C(c, i) p^(i-1) (1 - p)^(c-i-1) (i/c - p), 1 <= i <= c.
// Negative exactly when p > i/c.
double scalar_rho(int c, int i, double p);

// J(theta, p) = theta . (q_sigma1 - q_sigma0) = rho_c(p) + sum_{i<c} theta_i rho_i(p).
// The simple-decoder pointwise rate vanishes iff J = 0.
double null_rate_functional(const CollusionChannel& ch, double p);

enum class StrategyKind { JointClosedForm, SimpleWorst, Custom };

// A p-dependent attack theta(p) for colluders who know the time-sharing sequence.
class ClassDStrategy {
 public:
  using Rule = std::function<CollusionChannel(double)>;

  ClassDStrategy(int c, StrategyKind kind, Rule rule);

  int c() const noexcept { return c_; }
  StrategyKind kind() const noexcept { return kind_; }

  // Evaluates the rule; failures surface as IntegrandError("strategy undefined at p=...").
  CollusionChannel operator()(double p) const;

 private:
  int c_;
  StrategyKind kind_;
  Rule rule_;
};

std::string_view to_string(StrategyKind kind);

// Comma-separated decimals with a fixed number of places.
std::string format_theta(std::span<const double> theta, int decimals);

}  // namespace collrates
