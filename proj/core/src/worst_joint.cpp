#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "collrates/entropy.hpp"
#include "collrates/worst.hpp"
#include "node_table.hpp"

namespace collrates {
namespace {

// 1 / (1 + e^x) without overflow.
double logistic_neg(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

void check_joint_size(int c) {
  if (c < 2 || c > kMaxJointSolverC) {
    if (c >= 1 && c <= kMaxCollusionSize) {
      throw CapabilityError("joint worst-attack solver supports 2 <= c <= " +
                            std::to_string(kMaxJointSolverC));
    }
    throw InvalidArgument("invalid collusion size " + std::to_string(c));
  }
}

// Joint rate in nats through the cached rows.
double joint_rate_nats(const detail::NodeTable& t, const std::vector<double>& theta) {
  std::vector<double> h(theta.size());
  for (std::size_t s = 0; s < theta.size(); ++s) h[s] = binary_entropy(theta[s]);
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double* r = t.row(k);
    double q = 0.0;
    double cond = 0.0;
    for (int s = 0; s <= t.c; ++s) {
      q += theta[static_cast<std::size_t>(s)] * r[s];
      cond += h[static_cast<std::size_t>(s)] * r[s];
    }
    sum.add(t.w[k] * (binary_entropy(q) - cond));
  }
  return sum.value() / t.c;
}

std::vector<double> alternating_step(const detail::NodeTable& t, const std::vector<double>& theta) {
  const int c = t.c;
  std::vector<detail::CompensatedSum> num(static_cast<std::size_t>(c + 1));
  std::vector<detail::CompensatedSum> den(static_cast<std::size_t>(c + 1));
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t.w[k] <= 0.0 || t.p[k] <= 0.0 || t.p[k] >= 1.0) continue;
    const double q = t.q(k, theta);
    if (!(q > 0.0 && q < 1.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "degenerate update: Pr(Y=1|P=p) = " << q << " at p=" << t.p[k];
      throw DegenerateUpdate(msg.str());
    }
    const double log_odds = std::log1p(-q) - std::log(q);
    const double* r = t.row(k);
    for (int s = 1; s < c; ++s) {
      num[static_cast<std::size_t>(s)].add(t.w[k] * r[s] * log_odds);
      den[static_cast<std::size_t>(s)].add(t.w[k] * r[s]);
    }
  }
  std::vector<double> next = theta;
  for (int s = 1; s < c; ++s) {
    const double d = den[static_cast<std::size_t>(s)].value();
    if (!(d > 0.0)) throw DegenerateUpdate("degenerate update: no probability mass inside (0, 1)");
    next[static_cast<std::size_t>(s)] = logistic_neg(num[static_cast<std::size_t>(s)].value() / d);
  }
  return next;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(gap_tol_bits > 0.0)) throw InvalidArgument("gap tolerance must be positive");
  if (!(theta_tol > 0.0)) throw InvalidArgument("theta tolerance must be positive");
  if (grid_points < 11) throw InvalidArgument("grid_points must be >= 11");
  if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
  if (quadrature.tardos_nodes < 2 || quadrature.flat_nodes < 2) {
    throw InvalidArgument("quadrature needs at least two nodes");
  }
}

std::vector<double> joint_alternating_update(const CollusionChannel& current,
                                             const TimeSharingDist& dist,
                                             const QuadratureConfig& cfg) {
  detail::NodeTable table(current.c(), dist, cfg);
  const auto theta = current.theta();
  return alternating_step(table, std::vector<double>(theta.begin(), theta.end()));
}

JointWorstResult worst_joint_bc(int c, const TimeSharingDist& dist, const SolverConfig& cfg,
                                const std::optional<CollusionChannel>& initial) {
  check_joint_size(c);
  cfg.validate();
  if (initial && initial->c() != c) throw InvalidArgument("initial channel has the wrong size");

  detail::NodeTable table(c, dist, cfg.quadrature);
  const CollusionChannel start = initial ? *initial : CollusionChannel::class_a(c);
  std::vector<double> theta(start.theta().begin(), start.theta().end());

  std::vector<double> history;
  double rate_bits = to_bits(joint_rate_nats(table, theta));
  history.push_back(rate_bits);
  double gap = 0.0;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    std::vector<double> updated = alternating_step(table, theta);
    double step = 0.0;
    for (std::size_t s = 0; s < theta.size(); ++s) step = std::max(step, std::abs(updated[s] - theta[s]));
    theta = std::move(updated);
    const double next = to_bits(joint_rate_nats(table, theta));
    // Each half-step minimizes the same functional, so the sequence can only
    // go down; allow for rounding in the quadrature sum.
    if (next > rate_bits + 1e-14 + 1e-12 * rate_bits) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "alternating minimization increased the rate at iteration " << iter << ": "
          << rate_bits << " -> " << next;
      throw std::logic_error(msg.str());
    }
    gap = std::abs(rate_bits - next);
    rate_bits = next;
    history.push_back(rate_bits);
    if (gap < cfg.gap_tol_bits && step < cfg.theta_tol) {
      return JointWorstResult{CollusionChannel(theta), std::max(rate_bits, 0.0),
                              SolverDiagnostics{iter, gap, table.size()}, std::move(history)};
    }
  }
  throw ConvergenceError("alternating minimization did not converge in " +
                             std::to_string(cfg.max_iters) + " iterations",
                         cfg.max_iters, gap);
}

double joint_classd_theta(int c, double p) {
  if (c < 1) throw InvalidArgument("invalid collusion size");
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  // 1 / (1 + ((1-p)/p)^c)
  return logistic_neg(c * (std::log1p(-p) - std::log(p)));
}

ClassDStrategy worst_joint_classd(int c) {
  if (c < 2 || c > kMaxCollusionSize) throw InvalidArgument("invalid collusion size " + std::to_string(c));
  return ClassDStrategy(c, StrategyKind::JointClosedForm, [c](double p) {
    const double t = joint_classd_theta(c, p);
    std::vector<double> theta(static_cast<std::size_t>(c + 1), t);
    theta.front() = 0.0;
    theta.back() = 1.0;
    return CollusionChannel(std::move(theta));
  });
}

double capacity_classd_joint(int c) {
  if (c < 2 || c > kMaxCollusionSize) throw InvalidArgument("invalid collusion size " + std::to_string(c));
  return 1.0 / (c * std::ldexp(1.0, c - 1));
}

}  // namespace collrates
