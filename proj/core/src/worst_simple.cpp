#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "collrates/entropy.hpp"
#include "collrates/parallel.hpp"
#include "collrates/rng.hpp"
#include "collrates/worst.hpp"
#include "node_table.hpp"

namespace collrates {
namespace {

// Simple-decoder rate (bits) and its gradient over all c + 1 entries.
double simple_objective(const detail::NodeTable& t, const std::vector<double>& theta,
                        std::vector<double>* grad) {
  const int c = t.c;
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double p = t.p[k];
    const double* r = t.row(k);
    const double* r1 = t.row1(k);
    double q = 0.0;
    double q1 = 0.0;
    double q0 = 0.0;
    for (int s = 0; s <= c; ++s) {
      const double th = theta[static_cast<std::size_t>(s)];
      q += th * r[s];
      if (s > 0) q1 += th * r1[s - 1];
      if (s < c) q0 += th * r1[s];
    }
    const double nats = binary_entropy(q) - p * binary_entropy(q1) - (1.0 - p) * binary_entropy(q0);
    sum.add(t.w[k] * nats);
    if (grad) {
      const double dq = binary_entropy_derivative(q);
      const double dq1 = p * binary_entropy_derivative(q1);
      const double dq0 = (1.0 - p) * binary_entropy_derivative(q0);
      for (int s = 0; s <= c; ++s) {
        double d = r[s] * dq;
        if (s > 0) d -= r1[s - 1] * dq1;
        if (s < c) d -= r1[s] * dq0;
        (*grad)[static_cast<std::size_t>(s)] += t.w[k] * d;
      }
    }
  }
  if (grad) {
    for (double& g : *grad) g = to_bits(g);
  }
  return to_bits(sum.value());
}

// Maps the free variables x (each in [0, 1]) to theta and pulls the full
// gradient back onto x.
struct Parameterization {
  int c;
  SearchSpace space;

  std::size_t dim() const {
    return static_cast<std::size_t>(space == SearchSpace::ClassC ? c - 1 : (c - 1) / 2);
  }

  std::vector<double> theta(const std::vector<double>& x) const {
    std::vector<double> th(static_cast<std::size_t>(c + 1), 0.0);
    th.back() = 1.0;
    if (space == SearchSpace::ClassC) {
      for (std::size_t j = 0; j < x.size(); ++j) th[j + 1] = x[j];
    } else {
      for (std::size_t j = 0; j < x.size(); ++j) {
        th[j + 1] = x[j];
        th[static_cast<std::size_t>(c) - j - 1] = 1.0 - x[j];
      }
      if (c % 2 == 0) th[static_cast<std::size_t>(c / 2)] = 0.5;
    }
    return th;
  }

  void pull_back(const std::vector<double>& full, std::vector<double>& g) const {
    for (std::size_t j = 0; j < g.size(); ++j) {
      g[j] = full[j + 1];
      if (space == SearchSpace::ClassB) g[j] -= full[static_cast<std::size_t>(c) - j - 1];
    }
  }

  std::vector<double> start_class_a() const {
    std::vector<double> x(dim());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = static_cast<double>(j + 1) / c;
    return x;
  }
};

double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g) {
  double norm = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    norm = std::max(norm, std::abs(std::clamp(x[j] - g[j], 0.0, 1.0) - x[j]));
  }
  return norm;
}

// Spectral projected gradient on the unit box with a nonmonotone Armijo
// search (Birgin, Martinez and Raydan).
RestartRecord spg(const detail::NodeTable& table, const Parameterization& par, std::vector<double> x,
                  int max_iters) {
  constexpr double kGamma = 1e-4;
  constexpr std::size_t kMemory = 10;
  constexpr double kStepMin = 1e-12;
  constexpr double kStepMax = 1e12;
  constexpr double kTol = 1e-10;
  // Round-off floor: a failed line search this close to stationarity counts
  // as converged.
  constexpr double kLooseTol = 1e-6;

  const std::size_t n = x.size();
  std::vector<double> full(static_cast<std::size_t>(par.c + 1));
  std::vector<double> g(n);
  auto evaluate = [&](const std::vector<double>& point, std::vector<double>& grad) {
    const double f = simple_objective(table, par.theta(point), &full);
    par.pull_back(full, grad);
    return f;
  };

  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  double f = evaluate(x, g);
  if (n == 0) return RestartRecord{par.theta(x), f, 0, true};

  std::deque<double> recent{f};
  double pg = projected_gradient_norm(x, g);
  double lambda = std::clamp(1.0 / std::max(pg, 1e-300), kStepMin, kStepMax);
  std::vector<double> d(n), xn(n), gn(n);
  int iter = 0;
  bool converged = pg < kTol;
  while (!converged && iter < max_iters) {
    ++iter;
    double slope = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = std::clamp(x[j] - lambda * g[j], 0.0, 1.0) - x[j];
      slope += g[j] * d[j];
    }
    const double f_ref = *std::max_element(recent.begin(), recent.end());
    double alpha = 1.0;
    double fn = 0.0;
    bool accepted = false;
    while (alpha > 1e-20) {
      for (std::size_t j = 0; j < n; ++j) xn[j] = std::clamp(x[j] + alpha * d[j], 0.0, 1.0);
      fn = evaluate(xn, gn);
      if (fn <= f_ref + kGamma * alpha * slope) {
        accepted = true;
        break;
      }
      // Safeguarded quadratic interpolation.
      const double trial = -0.5 * slope * alpha * alpha / (fn - f - slope * alpha);
      alpha = (trial >= 0.1 * alpha && trial <= 0.9 * alpha) ? trial : 0.5 * alpha;
    }
    if (!accepted) {
      converged = pg < kLooseTol;
      break;
    }
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = xn[j] - x[j];
      ss += s * s;
      sy += s * (gn[j] - g[j]);
    }
    lambda = sy > 0.0 ? std::clamp(ss / sy, kStepMin, kStepMax) : kStepMax;
    x.swap(xn);
    g.swap(gn);
    f = fn;
    recent.push_back(f);
    if (recent.size() > kMemory) recent.pop_front();
    pg = projected_gradient_norm(x, g);
    converged = pg < kTol;
  }
  return RestartRecord{par.theta(x), f, iter, converged};
}

void check_simple_size(int c) {
  if (c < 2 || c > kMaxCollusionSize) throw InvalidArgument("invalid collusion size " + std::to_string(c));
  if (c > kMaxSimpleSolverC) {
    throw CapabilityError("simple-decoder worst-attack search supports 2 <= c <= " +
                          std::to_string(kMaxSimpleSolverC));
  }
}

SimpleWorstResult search(int c, const TimeSharingDist& dist, const SolverConfig& cfg, SearchSpace space) {
  detail::NodeTable table(c, dist, cfg.quadrature);
  const Parameterization par{c, space};
  const auto records = parallel_map(static_cast<std::size_t>(cfg.restarts), [&](std::size_t r) {
    std::vector<double> x = par.start_class_a();
    if (r > 0) {
      auto engine = make_stream(cfg.seed, "simple-restart", r);
      for (double& v : x) v = uniform01(engine);
    }
    return spg(table, par, std::move(x), cfg.max_iters);
  });

  std::size_t best = 0;
  bool any_converged = false;
  int total_iters = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    any_converged = any_converged || records[r].converged;
    total_iters += records[r].iterations;
    if (records[r].rate_bits < records[best].rate_bits) best = r;
  }
  if (!any_converged) {
    throw OptimizerStalled("optimizer stalled: no restart reached a stationary point", total_iters,
                           0.0, records[best].theta, records[best].rate_bits);
  }
  std::vector<double> full(static_cast<std::size_t>(c + 1));
  std::vector<double> x(par.dim());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = records[best].theta[j + 1];
  simple_objective(table, records[best].theta, &full);
  std::vector<double> g(par.dim());
  par.pull_back(full, g);

  SimpleWorstResult result{CollusionChannel(records[best].theta),
                           std::max(records[best].rate_bits, 0.0),
                           SolverDiagnostics{records[best].iterations, projected_gradient_norm(x, g),
                                             table.size()},
                           records,
                           std::nullopt,
                           std::nullopt};
  return result;
}

}  // namespace

double simple_rate_with_gradient(const CollusionChannel& ch, const TimeSharingDist& dist,
                                 std::span<double> gradient, const QuadratureConfig& cfg) {
  if (gradient.size() != static_cast<std::size_t>(ch.c() + 1)) {
    throw InvalidArgument("gradient needs c + 1 entries");
  }
  detail::NodeTable table(ch.c(), dist, cfg);
  std::vector<double> grad(gradient.size());
  const double f = simple_objective(table, std::vector<double>(ch.theta().begin(), ch.theta().end()), &grad);
  std::copy(grad.begin(), grad.end(), gradient.begin());
  return f;
}

SimpleWorstResult worst_simple_bc(int c, const TimeSharingDist& dist, const SolverConfig& cfg,
                                  SearchSpace space) {
  check_simple_size(c);
  cfg.validate();
  SimpleWorstResult result = search(c, dist, cfg, space);
  if (space == SearchSpace::ClassC && dist.is_symmetric()) {
    const SimpleWorstResult restricted = search(c, dist, cfg, SearchSpace::ClassB);
    double asym = 0.0;
    for (int s = 0; s <= c; ++s) {
      asym = std::max(asym, std::abs(result.channel[s] - (1.0 - result.channel[c - s])));
    }
    result.class_b_rate_bits = restricted.rate_bits;
    result.asymmetry = asym;
    // Class B sits inside class C, so a better restricted point is also a
    // better class-C point.
    if (restricted.rate_bits < result.rate_bits) {
      result.channel = restricted.channel;
      result.rate_bits = restricted.rate_bits;
      result.diagnostics = restricted.diagnostics;
    }
  }
  return result;
}

}  // namespace collrates
