#include "collrates/timeshare.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace collrates {
namespace {

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw InvalidArgument("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<QuadratureNode> tardos_nodes(int n) {
  std::vector<QuadratureNode> nodes(static_cast<std::size_t>(n));
  const double weight = 1.0 / n;
  for (int k = 0; k < n; ++k) {
    const double u = (k + 0.5) * std::numbers::pi / n;
    // (1 - cos u) / 2 = sin^2(u / 2), which keeps full relative precision near 0.
    const double s = std::sin(0.5 * u);
    nodes[static_cast<std::size_t>(k)] = {s * s, weight};
  }
  return nodes;
}

std::vector<QuadratureNode> flat_nodes(int n) {
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(n, x, w);
  std::vector<QuadratureNode> nodes(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    nodes[k] = {0.5 * (x[k] + 1.0), 0.5 * w[k]};
  }
  return nodes;
}

std::shared_ptr<const std::vector<QuadratureNode>> cached_rule(DistKind kind, int n) {
  static std::mutex mutex;
  static std::map<std::pair<DistKind, int>, std::shared_ptr<const std::vector<QuadratureNode>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{kind, n}];
  if (!slot) {
    slot = std::make_shared<const std::vector<QuadratureNode>>(
        kind == DistKind::Tardos ? tardos_nodes(n) : flat_nodes(n));
  }
  return slot;
}

}  // namespace

TimeSharingDist TimeSharingDist::tardos() { return {DistKind::Tardos, 0.0, {}}; }

TimeSharingDist TimeSharingDist::flat() { return {DistKind::Flat, 0.0, {}}; }

TimeSharingDist TimeSharingDist::dirac_pair(double p0) {
  if (!(p0 > 0.0 && p0 <= 0.5)) {
    throw InvalidArgument("dirac pair location must lie in (0, 1/2], got " + format_number(p0));
  }
  std::vector<SupportPoint> support;
  if (p0 == 0.5) {
    support.push_back({0.5, 1.0});
  } else {
    support.push_back({p0, 0.5});
    support.push_back({1.0 - p0, 0.5});
  }
  return {DistKind::DiracPair, p0, std::move(support)};
}

TimeSharingDist TimeSharingDist::discrete(std::vector<SupportPoint> support) {
  if (support.empty()) throw InvalidArgument("discrete distribution needs at least one atom");
  double total = 0.0;
  for (const auto& atom : support) {
    if (!(atom.p >= 0.0 && atom.p <= 1.0)) {
      throw InvalidArgument("discrete support point outside [0, 1]: " + format_number(atom.p));
    }
    if (!(atom.weight > 0.0)) {
      throw InvalidArgument("discrete weights must be positive, got " + format_number(atom.weight));
    }
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("discrete weights must sum to 1, got " + format_number(total));
  }
  return {DistKind::Discrete, 0.0, std::move(support)};
}

TimeSharingDist TimeSharingDist::parse(std::string_view selector) {
  if (selector == "tardos") return tardos();
  if (selector == "flat") return flat();
  if (selector.starts_with("dirac:")) {
    return dirac_pair(parse_number(selector.substr(6), "dirac location"));
  }
  if (selector.starts_with("discrete:")) {
    std::vector<SupportPoint> support;
    std::string_view rest = selector.substr(9);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) {
        throw InvalidArgument("discrete atom must be <p>:<w>, got '" + std::string(item) + "'");
      }
      support.push_back({parse_number(item.substr(0, colon), "support point"),
                         parse_number(item.substr(colon + 1), "weight")});
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return discrete(std::move(support));
  }
  throw InvalidArgument("unknown pdf selector '" + std::string(selector) + "'");
}

bool TimeSharingDist::is_symmetric() const {
  if (kind_ != DistKind::Discrete) return true;
  for (const auto& atom : support_) {
    double mirrored = 0.0;
    double here = 0.0;
    for (const auto& other : support_) {
      if (std::abs(other.p - (1.0 - atom.p)) <= 1e-12) mirrored += other.weight;
      if (std::abs(other.p - atom.p) <= 1e-12) here += other.weight;
    }
    if (std::abs(mirrored - here) > 1e-12) return false;
  }
  return true;
}

std::string TimeSharingDist::selector() const {
  switch (kind_) {
    case DistKind::Tardos: return "tardos";
    case DistKind::Flat: return "flat";
    case DistKind::DiracPair: return "dirac:" + format_number(p0_);
    case DistKind::Discrete: {
      std::string out = "discrete:";
      for (std::size_t i = 0; i < support_.size(); ++i) {
        if (i) out += ',';
        out += format_number(support_[i].p) + ":" + format_number(support_[i].weight);
      }
      return out;
    }
  }
  return {};
}

DensityValue density(const TimeSharingDist& dist, double p) {
  switch (dist.kind()) {
    case DistKind::Tardos:
      if (p <= 0.0 || p >= 1.0) {
        throw InvalidArgument("endpoint singularity: tardos density undefined at p=" + format_number(p));
      }
      return {1.0 / (std::numbers::pi * std::sqrt(p * (1.0 - p))), false};
    case DistKind::Flat:
      if (p < 0.0 || p > 1.0) throw InvalidArgument("p outside [0, 1]: " + format_number(p));
      return {1.0, false};
    case DistKind::DiracPair:
    case DistKind::Discrete: {
      double mass = 0.0;
      for (const auto& atom : dist.support()) {
        if (atom.p == p) mass += atom.weight;
      }
      return {mass, true};
    }
  }
  return {0.0, false};
}

Quadrature::Quadrature(const TimeSharingDist& dist, const QuadratureConfig& cfg) {
  switch (dist.kind()) {
    case DistKind::Tardos:
      if (cfg.tardos_nodes < 1) throw InvalidArgument("tardos node count must be positive");
      nodes_ = cached_rule(DistKind::Tardos, cfg.tardos_nodes);
      break;
    case DistKind::Flat:
      if (cfg.flat_nodes < 1) throw InvalidArgument("flat node count must be positive");
      nodes_ = cached_rule(DistKind::Flat, cfg.flat_nodes);
      break;
    case DistKind::DiracPair:
    case DistKind::Discrete: {
      auto nodes = std::make_shared<std::vector<QuadratureNode>>();
      for (const auto& atom : dist.support()) nodes->push_back({atom.p, atom.weight});
      nodes_ = std::move(nodes);
      break;
    }
  }
}

void Quadrature::throw_integrand_failure(double p) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "integrand failure at p=" << p;
  throw IntegrandError(msg.str());
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("gauss-legendre order must be positive");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // One more evaluation of the derivative at the converged root.
        double q0 = 1.0;
        double q1 = x;
        for (int k = 2; k <= n; ++k) {
          const double q2 = ((2.0 * k - 1.0) * x * q1 - (k - 1.0) * q0) / k;
          q0 = q1;
          q1 = q2;
        }
        dp = n * (x * q1 - q0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

}  // namespace collrates
