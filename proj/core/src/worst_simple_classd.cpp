#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "collrates/entropy.hpp"
#include "collrates/worst.hpp"

namespace collrates {
namespace {

constexpr double kGolden = 0.6180339887498949;

// theta = (0, t, 0, ..., 0, 1)
std::vector<double> low_ray(int c, double t) {
  std::vector<double> theta(static_cast<std::size_t>(c + 1), 0.0);
  theta[1] = t;
  theta.back() = 1.0;
  return theta;
}

// theta'_s = 1 - theta_{c-s}; applied to a channel computed at 1 - p.
std::vector<double> mirror(const std::vector<double>& theta) {
  const std::size_t n = theta.size();
  std::vector<double> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = 1.0 - theta[n - 1 - s];
  return out;
}

// Channel for p <= 1/2, c >= 3.
std::vector<double> lower_half(int c, double p, double eta, int grid_points) {
  if (p >= eta) {
    // On the null-rate hyperplane along the theta_1 ray:
    // J = rho_c + lambda rho_1 = 0.
    // rho_1 carries the factor (1/c - p), only ~1e-8 wide at p = eta_c for
    // c near 10, so lambda overshoots 1 by rounding right at the boundary.
    const double lambda = -scalar_rho(c, c, p) / scalar_rho(c, 1, p);
    if (!(lambda >= -1e-9 && lambda <= 1.0 + 1e-4)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "null-rate solution " << lambda << " outside [0, 1] at p=" << p << ", c=" << c;
      throw std::logic_error(msg.str());
    }
    return low_ray(c, std::clamp(lambda, 0.0, 1.0));
  }
  if (p >= 1.0 / c) return low_ray(c, 1.0);
  return low_ray(c, simple_classd_line_search(c, p, grid_points));
}

}  // namespace

double null_rate_polynomial(int c, double p) {
  return std::pow(1.0 - p, c - 2) * (1.0 - c * p) + std::pow(p, c - 1);
}

double eta_c(int c) {
  if (c < 3) throw InvalidArgument("no null-rate interval for c=" + std::to_string(c));
  if (c > kMaxCollusionSize) throw InvalidArgument("invalid collusion size " + std::to_string(c));
  // (1 - 2p)^2 has a double root: no sign change to bracket.
  if (c == 3) return 0.5;
  // Bisect on d = p - 1/c so that 1 - c p = -c d is exact.
  const double base = 1.0 / c;
  auto f = [&](double d) { return std::pow(1.0 - base - d, c - 2) * (-c * d) + std::pow(base + d, c - 1); };
  double lo = 0.0;
  double hi = base;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return base + 0.5 * (lo + hi);
}

double simple_classd_line_objective(int c, double p, double t) {
  const double a = std::pow(1.0 - p, c - 2);
  const double g1 = t * c * p * a * (1.0 - p) + std::pow(p, c);
  const double g2 = t * a * (1.0 - p) + std::pow(p, c - 1);
  const double g3 = t * (c - 1) * p * a;
  const double nats = binary_entropy(g1) - p * binary_entropy(g2) - (1.0 - p) * binary_entropy(g3);
  return to_bits(nats);
}

double simple_classd_line_search(int c, double p, int grid_points) {
  if (grid_points < 2) throw InvalidArgument("line search needs at least two grid points");
  auto f = [&](double t) { return simple_classd_line_objective(c, p, t); };
  const int n = grid_points - 1;
  int best = 0;
  double best_value = f(0.0);
  for (int i = 1; i <= n; ++i) {
    const double value = f(static_cast<double>(i) / n);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  double lo = static_cast<double>(std::max(best - 1, 0)) / n;
  double hi = static_cast<double>(std::min(best + 1, n)) / n;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-12) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  const double t = 0.5 * (lo + hi);
  // The grid point wins if refinement did not improve on it.
  const double grid_t = static_cast<double>(best) / n;
  return f(t) <= best_value ? t : grid_t;
}

ClassDStrategy worst_simple_classd(int c, const SolverConfig& cfg) {
  if (c < 2 || c > kMaxCollusionSize) throw InvalidArgument("invalid collusion size " + std::to_string(c));
  cfg.validate();
  if (c == 2) {
    return ClassDStrategy(2, StrategyKind::SimpleWorst, [](double p) {
      return CollusionChannel({0.0, joint_classd_theta(2, p), 1.0});
    });
  }
  const double eta = eta_c(c);
  const int grid = cfg.grid_points;
  return ClassDStrategy(c, StrategyKind::SimpleWorst, [c, eta, grid](double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p outside [0, 1]");
    if (p <= 0.5) return CollusionChannel(lower_half(c, p, eta, grid));
    return CollusionChannel(mirror(lower_half(c, 1.0 - p, eta, grid)));
  });
}

}  // namespace collrates
