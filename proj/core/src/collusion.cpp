#include "collrates/collusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace collrates {
namespace {

void check_size(int c) {
  if (c < 1 || c > kMaxCollusionSize) {
    throw InvalidArgument("invalid collusion size " + std::to_string(c) + " (expected 1.." +
                          std::to_string(kMaxCollusionSize) + ")");
  }
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// p^a (1-p)^b with the 0^0 = 1 convention.
double power_pair(double p, int a, int b) {
  return std::pow(p, a) * std::pow(1.0 - p, b);
}

}  // namespace

ClassTag parse_class_tag(std::string_view tag) {
  if (tag == "A") return ClassTag::A;
  if (tag == "B") return ClassTag::B;
  if (tag == "C") return ClassTag::C;
  if (tag == "D") return ClassTag::D;
  throw InvalidArgument("unknown collusion class '" + std::string(tag) + "'");
}

std::string_view to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::A: return "A";
    case ClassTag::B: return "B";
    case ClassTag::C: return "C";
    case ClassTag::D: return "D";
  }
  return "?";
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= 50) {
    k = std::min(k, n - k);
    std::uint64_t value = 1;
    for (int i = 1; i <= k; ++i) {
      value = value * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(value);
  }
  return std::exp(log_binomial(n, k));
}

double bernstein(int c, int sigma, double p) {
  if (c < 0 || c > kMaxCollusionSize) check_size(c);
  if (sigma < 0 || sigma > c) {
    throw InvalidArgument("invalid sigma " + std::to_string(sigma) + " for c=" + std::to_string(c));
  }
  if (p <= 0.0) return sigma == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return sigma == c ? 1.0 : 0.0;
  if (c <= 50) return binomial(c, sigma) * power_pair(p, sigma, c - sigma);
  return std::exp(log_binomial(c, sigma) + sigma * std::log(p) + (c - sigma) * std::log1p(-p));
}

std::vector<double> bernstein_row(int c, double p) {
  std::vector<double> row(static_cast<std::size_t>(c + 1));
  for (int s = 0; s <= c; ++s) row[static_cast<std::size_t>(s)] = bernstein(c, s, p);
  return row;
}

CollusionChannel::CollusionChannel(std::vector<double> theta) : theta_(std::move(theta)) {
  check_size(c());
  for (std::size_t s = 0; s < theta_.size(); ++s) {
    double& t = theta_[s];
    if (!std::isfinite(t) || t < -kChannelTolerance || t > 1.0 + kChannelTolerance) {
      throw InvalidArgument("theta[" + std::to_string(s) + "] outside [0, 1]");
    }
    t = std::clamp(t, 0.0, 1.0);
  }
  if (theta_.front() > kChannelTolerance || theta_.back() < 1.0 - kChannelTolerance) {
    throw InvalidArgument("marking assumption requires theta[0] = 0 and theta[c] = 1");
  }
  theta_.front() = 0.0;
  theta_.back() = 1.0;
}

CollusionChannel CollusionChannel::class_a(int c) {
  check_size(c);
  std::vector<double> theta(static_cast<std::size_t>(c + 1));
  for (int s = 0; s <= c; ++s) theta[static_cast<std::size_t>(s)] = static_cast<double>(s) / c;
  return CollusionChannel(std::move(theta));
}

CollusionChannel CollusionChannel::parse(std::string_view text) {
  std::vector<double> theta;
  while (true) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw InvalidArgument("invalid theta entry '" + std::string(item) + "'");
    }
    theta.push_back(value);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  if (theta.size() < 2) throw InvalidArgument("theta needs at least two entries");
  return CollusionChannel(std::move(theta));
}

bool CollusionChannel::is_class_a(double tol) const {
  for (int s = 0; s <= c(); ++s) {
    if (std::abs((*this)[s] - static_cast<double>(s) / c()) > tol) return false;
  }
  return true;
}

bool CollusionChannel::is_class_b(double tol) const {
  for (int s = 0; s <= c(); ++s) {
    if (std::abs((*this)[s] - (1.0 - (*this)[c() - s])) > tol) return false;
  }
  return true;
}

std::string CollusionChannel::to_string() const {
  std::string out;
  char buf[64];
  for (std::size_t s = 0; s < theta_.size(); ++s) {
    if (s) out += ',';
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), theta_[s]);
    out.append(buf, ptr);
  }
  return out;
}

std::string CollusionChannel::to_string(int decimals) const { return format_theta(theta_, decimals); }

std::string format_theta(std::span<const double> theta, int decimals) {
  std::string out;
  char buf[64];
  for (std::size_t s = 0; s < theta.size(); ++s) {
    if (s) out += ',';
    // Avoid printing "-0.000" for values a hair below zero.
    const double v = std::abs(theta[s]) < 0.5 * std::pow(10.0, -decimals) ? 0.0 : theta[s];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    out += buf;
  }
  return out;
}

double prob_y1(const CollusionChannel& ch, double p) {
  const int c = ch.c();
  double sum = 0.0;
  for (int s = 1; s <= c; ++s) sum += ch[s] * bernstein(c, s, p);
  return sum;
}

double prob_y1_derivative(const CollusionChannel& ch, double p) {
  const int c = ch.c();
  double sum = 0.0;
  for (int s = 0; s < c; ++s) sum += (ch[s + 1] - ch[s]) * bernstein(c - 1, s, p);
  return c * sum;
}

double prob_y1_given_x(const CollusionChannel& ch, int x, double p) {
  const int c = ch.c();
  double sum = 0.0;
  if (x == 1) {
    for (int k = 1; k <= c; ++k) sum += ch[k] * bernstein(c - 1, k - 1, p);
  } else if (x == 0) {
    for (int k = 0; k < c; ++k) sum += ch[k] * bernstein(c - 1, k, p);
  } else {
    throw InvalidArgument("x must be 0 or 1");
  }
  return sum;
}

std::vector<double> q_sigma1(int c, double p) {
  check_size(c);
  std::vector<double> q(static_cast<std::size_t>(c + 1), 0.0);
  for (int s = 1; s <= c; ++s) q[static_cast<std::size_t>(s)] = bernstein(c - 1, s - 1, p);
  return q;
}

std::vector<double> q_sigma0(int c, double p) {
  check_size(c);
  std::vector<double> q(static_cast<std::size_t>(c + 1), 0.0);
  for (int s = 0; s < c; ++s) q[static_cast<std::size_t>(s)] = bernstein(c - 1, s, p);
  return q;
}

double scalar_rho(int c, int i, double p) {
  check_size(c);
  if (i < 1 || i > c) throw InvalidArgument("rho index must lie in [1, c]");
  if (i == c) return std::pow(p, c - 1);
  return binomial(c, i) * power_pair(p, i - 1, c - i - 1) * (static_cast<double>(i) / c - p);
}

double null_rate_functional(const CollusionChannel& ch, double p) {
  const int c = ch.c();
  double sum = scalar_rho(c, c, p);
  for (int i = 1; i < c; ++i) sum += ch[i] * scalar_rho(c, i, p);
  return sum;
}

ClassDStrategy::ClassDStrategy(int c, StrategyKind kind, Rule rule)
    : c_(c), kind_(kind), rule_(std::move(rule)) {
  check_size(c);
  if (!rule_) throw InvalidArgument("class-D strategy needs a rule");
}

CollusionChannel ClassDStrategy::operator()(double p) const {
  auto fail = [p](const std::string& why) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "strategy undefined at p=" << p;
    if (!why.empty()) msg << ": " << why;
    return IntegrandError(msg.str());
  };
  try {
    CollusionChannel ch = rule_(p);
    if (ch.c() != c_) throw fail("rule returned a channel of the wrong size");
    return ch;
  } catch (const IntegrandError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::JointClosedForm: return "joint-closed-form";
    case StrategyKind::SimpleWorst: return "simple-worst";
    case StrategyKind::Custom: return "custom";
  }
  return "?";
}

}  // namespace collrates
