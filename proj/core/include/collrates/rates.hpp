#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "collrates/collusion.hpp"
#include "collrates/timeshare.hpp"

// Achievable rates of a probabilistic code against a collusion channel.
// Every public function here reports bits.
namespace collrates {

enum class Decoder { Joint, Simple };

Decoder parse_decoder(std::string_view name);
std::string_view to_string(Decoder decoder);

// Pointwise rates at a fixed time-sharing value p.
//   joint:  I(Y; X_C | P = p) / c
//   simple: I(Y; X | P = p)
// Tiny negative values from cancellation (> -1e-12) are returned as 0.
double r_joint_point(const CollusionChannel& ch, double p);
double r_simple_point(const CollusionChannel& ch, double p);
double r_point(Decoder decoder, const CollusionChannel& ch, double p);

// Relative-entropy form of the joint pointwise rate, evaluated independently
// of r_joint_point.
double r_joint_point_kl(const CollusionChannel& ch, double p);

double rate_joint(const CollusionChannel& ch, const TimeSharingDist& dist,
                  const QuadratureConfig& cfg = {});
double rate_joint_kl(const CollusionChannel& ch, const TimeSharingDist& dist,
                     const QuadratureConfig& cfg = {});
double rate_simple(const CollusionChannel& ch, const TimeSharingDist& dist,
                   const QuadratureConfig& cfg = {});
double rate(Decoder decoder, const CollusionChannel& ch, const TimeSharingDist& dist,
            const QuadratureConfig& cfg = {});

// E_P[r(theta(P), P)] with theta re-evaluated at each node.
double rate_classd(const ClassDStrategy& strategy, Decoder decoder, const TimeSharingDist& dist,
                   const QuadratureConfig& cfg = {});

// Pointwise joint rate under the worst p-aware attack:
// (1/c) [p^c log(((1-p)/p)^c + 1) + (1-p)^c log((p/(1-p))^c + 1)].
double r_joint_classd_closed(int c, double p);

// Class-A joint rates in closed form (gamma-function moments for the Tardos
// law, uniform moments for the flat law). Used to check the quadrature path.
double rate_joint_class_a_tardos_closed(int c);
double rate_joint_class_a_flat_closed(int c);

// Class-A simple rate written through the conditionals p + (1-p)/c and
// p (1 - 1/c).
double rate_simple_class_a_formula(int c, const TimeSharingDist& dist,
                                   const QuadratureConfig& cfg = {});

// n uniformly spaced points on [0, 1], endpoints included.
std::vector<double> uniform_grid(int n = 501);

struct SolverDiagnostics {
  int iterations = 0;
  double final_gap = 0.0;
  std::size_t node_count = 0;
};

struct RateReport {
  Decoder decoder;
  ClassTag class_tag;
  TimeSharingDist dist;
  int c;
  double rate_bits;
  std::variant<CollusionChannel, ClassDStrategy> channel;
  SolverDiagnostics diagnostics;
};

}  // namespace collrates
