#pragma once

#include <cmath>
#include <numbers>

// Binary entropy helpers. Everything here works in nats; callers convert to
// bits once, at the reporting boundary.
namespace collrates {

inline constexpr double kLn2 = std::numbers::ln2;

inline double to_bits(double nats) { return nats / kLn2; }
inline double to_nats(double bits) { return bits * kLn2; }

// x ln x with 0 ln 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// h_b(x) in nats; h_b(0) = h_b(1) = 0. Arguments are clamped to [0, 1].
inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -xlogx(x) - xlogx(1.0 - x);
}

// h_b'(x) = ln((1 - x) / x). The argument is clamped away from {0, 1} so the
// result stays finite; the clamp only matters where the derivative diverges.
inline double binary_entropy_derivative(double x) {
  constexpr double kEdge = 1e-16;
  if (x < kEdge) x = kEdge;
  if (x > 1.0 - kEdge) x = 1.0 - kEdge;
  return std::log1p(-x) - std::log(x);
}

}  // namespace collrates
