#include "collrates/rates.hpp"

#include <cmath>
#include <numbers>

#include "collrates/entropy.hpp"

namespace collrates {
namespace {

constexpr double kNegativeSlack = 1e-12;

double clamp_rate(double bits) { return (bits < 0.0 && bits > -kNegativeSlack) ? 0.0 : bits; }

// ln(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

Decoder parse_decoder(std::string_view name) {
  if (name == "joint") return Decoder::Joint;
  if (name == "simple") return Decoder::Simple;
  throw InvalidArgument("unknown decoder '" + std::string(name) + "'");
}

std::string_view to_string(Decoder decoder) {
  return decoder == Decoder::Joint ? "joint" : "simple";
}

double r_joint_point(const CollusionChannel& ch, double p) {
  const int c = ch.c();
  double conditional = 0.0;
  double q = 0.0;
  for (int s = 0; s <= c; ++s) {
    const double b = bernstein(c, s, p);
    q += ch[s] * b;
    conditional += b * binary_entropy(ch[s]);
  }
  return clamp_rate(to_bits(binary_entropy(q) - conditional) / c);
}

double r_joint_point_kl(const CollusionChannel& ch, double p) {
  const int c = ch.c();
  const double q = prob_y1(ch, p);
  double sum = 0.0;
  for (int s = 0; s <= c; ++s) {
    const double b = bernstein(c, s, p);
    if (b == 0.0) continue;
    const double t = ch[s];
    if (t > 0.0) sum += b * t * std::log(t / q);
    if (t < 1.0) sum += b * (1.0 - t) * std::log((1.0 - t) / (1.0 - q));
  }
  return clamp_rate(to_bits(sum) / c);
}

double r_simple_point(const CollusionChannel& ch, double p) {
  const double q = prob_y1(ch, p);
  const double q1 = prob_y1_given_x(ch, 1, p);
  const double q0 = prob_y1_given_x(ch, 0, p);
  const double nats = binary_entropy(q) - p * binary_entropy(q1) - (1.0 - p) * binary_entropy(q0);
  return clamp_rate(to_bits(nats));
}

double r_point(Decoder decoder, const CollusionChannel& ch, double p) {
  return decoder == Decoder::Joint ? r_joint_point(ch, p) : r_simple_point(ch, p);
}

double rate_joint(const CollusionChannel& ch, const TimeSharingDist& dist,
                  const QuadratureConfig& cfg) {
  return Quadrature(dist, cfg).expect([&](double p) { return r_joint_point(ch, p); });
}

double rate_joint_kl(const CollusionChannel& ch, const TimeSharingDist& dist,
                     const QuadratureConfig& cfg) {
  return Quadrature(dist, cfg).expect([&](double p) { return r_joint_point_kl(ch, p); });
}

double rate_simple(const CollusionChannel& ch, const TimeSharingDist& dist,
                   const QuadratureConfig& cfg) {
  return Quadrature(dist, cfg).expect([&](double p) { return r_simple_point(ch, p); });
}

double rate(Decoder decoder, const CollusionChannel& ch, const TimeSharingDist& dist,
            const QuadratureConfig& cfg) {
  return decoder == Decoder::Joint ? rate_joint(ch, dist, cfg) : rate_simple(ch, dist, cfg);
}

double rate_classd(const ClassDStrategy& strategy, Decoder decoder, const TimeSharingDist& dist,
                   const QuadratureConfig& cfg) {
  return Quadrature(dist, cfg).expect(
      [&](double p) { return r_point(decoder, strategy(p), p); });
}

double r_joint_classd_closed(int c, double p) {
  if (c < 1) throw InvalidArgument("invalid collusion size");
  if (p <= 0.0 || p >= 1.0) return 0.0;
  const double log_a = c * std::log(p);
  const double log_b = c * std::log1p(-p);
  // p^c ln((1-p)^c / p^c + 1) + (1-p)^c ln(p^c / (1-p)^c + 1)
  const double nats = std::exp(log_a) * softplus(log_b - log_a) +
                      std::exp(log_b) * softplus(log_a - log_b);
  return to_bits(nats) / c;
}

double rate_joint_class_a_tardos_closed(int c) {
  if (c < 1) throw InvalidArgument("invalid collusion size");
  // E[h_b(P)] = 2 - log2(e) under the arcsine law.
  double sum = 0.0;
  for (int s = 1; s < c; ++s) {
    const double log_moment = std::lgamma(s + 0.5) + std::lgamma(c - s + 0.5) -
                              std::lgamma(s + 1.0) - std::lgamma(c - s + 1.0);
    sum += std::exp(log_moment) * to_bits(binary_entropy(static_cast<double>(s) / c));
  }
  return (2.0 - std::numbers::log2e - sum / std::numbers::pi) / c;
}

double rate_joint_class_a_flat_closed(int c) {
  if (c < 1) throw InvalidArgument("invalid collusion size");
  double sum = 0.0;
  for (int s = 1; s < c; ++s) sum += to_bits(binary_entropy(static_cast<double>(s) / c));
  return (0.5 * std::numbers::log2e - sum / (c + 1.0)) / c;
}

double rate_simple_class_a_formula(int c, const TimeSharingDist& dist, const QuadratureConfig& cfg) {
  if (c < 1) throw InvalidArgument("invalid collusion size");
  const double inv_c = 1.0 / c;
  return Quadrature(dist, cfg).expect([&](double p) {
    const double nats = binary_entropy(p) - p * binary_entropy(p + (1.0 - p) * inv_c) -
                        (1.0 - p) * binary_entropy(p * (1.0 - inv_c));
    return to_bits(nats);
  });
}

std::vector<double> uniform_grid(int n) {
  if (n < 2) throw InvalidArgument("grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  return grid;
}

}  // namespace collrates
