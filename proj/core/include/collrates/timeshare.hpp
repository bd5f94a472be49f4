#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collrates/error.hpp"

namespace collrates {

enum class DistKind { Tardos, Flat, DiracPair, Discrete };

struct SupportPoint {
  double p;
  double weight;
};

// Law of the time-sharing variable P.
//
//  * Tardos:    f(p) = 1 / (pi sqrt(p (1 - p))) on (0, 1)
//  * Flat:      f(p) = 1 on [0, 1]
//  * DiracPair: mass 1/2 at p0 and 1/2 at 1 - p0, p0 in (0, 1/2]
//  * Discrete:  arbitrary finite pmf on [0, 1]
class TimeSharingDist {
 public:
  static TimeSharingDist tardos();
  static TimeSharingDist flat();
  static TimeSharingDist dirac_pair(double p0);
  static TimeSharingDist discrete(std::vector<SupportPoint> support);

  // "tardos" | "flat" | "dirac:<p0>" | "discrete:<p1>:<w1>,<p2>:<w2>,..."
  static TimeSharingDist parse(std::string_view selector);

  DistKind kind() const noexcept { return kind_; }
  bool is_continuous() const noexcept {
    return kind_ == DistKind::Tardos || kind_ == DistKind::Flat;
  }
  // f(p) == f(1 - p).
  bool is_symmetric() const;

  double dirac_p0() const noexcept { return p0_; }

  // Support of a discrete law (DiracPair is expanded to its one or two atoms).
  // Empty for continuous kinds.
  const std::vector<SupportPoint>& support() const noexcept { return support_; }

  // Round-trips through parse().
  std::string selector() const;

 private:
  TimeSharingDist(DistKind kind, double p0, std::vector<SupportPoint> support)
      : kind_(kind), p0_(p0), support_(std::move(support)) {}

  DistKind kind_;
  double p0_ = 0.0;
  std::vector<SupportPoint> support_;
};

struct QuadratureConfig {
  int tardos_nodes = 2001;
  int flat_nodes = 501;
  double tolerance_bits = 1e-10;
};

struct QuadratureNode {
  double p;
  double weight;
};

// Density at p for continuous kinds, or the mass sitting exactly at p for
// discrete ones.
struct DensityValue {
  double value;
  bool point_mass;
};

DensityValue density(const TimeSharingDist& dist, double p);

// Fixed rule approximating E_P[g(P)].
//
// Tardos: p = (1 - cos u) / 2 turns the arcsine weight into the uniform law on
// u in [0, pi]; the midpoint rule in u is then Gauss-Chebyshev of the first
// kind, exact for polynomials in p of degree < 2N.
// Flat: N-point Gauss-Legendre mapped to [0, 1].
// Discrete kinds: the support itself.
class Quadrature {
 public:
  explicit Quadrature(const TimeSharingDist& dist, const QuadratureConfig& cfg = {});

  std::span<const QuadratureNode> nodes() const noexcept { return *nodes_; }
  std::size_t size() const noexcept { return nodes_->size(); }

  // Compensated weighted sum of g over the nodes. Throws IntegrandError if g
  // returns a non-finite value at a node with positive weight.
  template <class F>
  double expect(F&& g) const {
    double sum = 0.0;
    double carry = 0.0;
    for (const QuadratureNode& node : *nodes_) {
      const double value = g(node.p);
      if (!std::isfinite(value)) throw_integrand_failure(node.p);
      const double term = node.weight * value;
      const double t = sum + term;
      carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
    }
    return sum + carry;
  }

 private:
  [[noreturn]] static void throw_integrand_failure(double p);

  std::shared_ptr<const std::vector<QuadratureNode>> nodes_;
};

template <class F>
double expect(const TimeSharingDist& dist, F&& g, const QuadratureConfig& cfg = {}) {
  return Quadrature(dist, cfg).expect(std::forward<F>(g));
}

// Gauss-Legendre nodes/weights on [-1, 1], ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace collrates
