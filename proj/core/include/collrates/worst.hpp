#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "collrates/collusion.hpp"
#include "collrates/rates.hpp"
#include "collrates/timeshare.hpp"

// Worst-case collusion channels per (decoder, class).
namespace collrates {

struct SolverConfig {
  int max_iters = 10000;
  double gap_tol_bits = 1e-12;
  // The alternating minimization also waits for max |theta step| to drop
  // below this; the rate settles long before theta does.
  double theta_tol = 1e-10;
  // Coarse grid of the class-D simple-decoder line search.
  int grid_points = 1001;
  int restarts = 20;
  std::uint64_t seed = 20091;
  QuadratureConfig quadrature;

  void validate() const;
};

// Solver caps on the collusion size.
inline constexpr int kMaxJointSolverC = 50;
inline constexpr int kMaxSimpleSolverC = 15;

// ---------------------------------------------------------------------------
// Joint decoder, classes B and C: alternating minimization of the
// relative-entropy form of the rate over theta and Pr(Y = 1 | P).

struct JointWorstResult {
  CollusionChannel channel;
  double rate_bits;
  SolverDiagnostics diagnostics;
  // Rate after each theta update, starting with the initial point.
  std::vector<double> rate_history;
};

// Starts from the class-A channel unless `initial` is given. For a symmetric
// law the iterates stay class-B. Throws ConvergenceError after cfg.max_iters
// and DegenerateUpdate when the update is undefined.
JointWorstResult worst_joint_bc(int c, const TimeSharingDist& dist, const SolverConfig& cfg = {},
                                const std::optional<CollusionChannel>& initial = std::nullopt);

// One theta update theta_sigma = 1 / (1 + B(sigma)) computed against
// q(p) = Pr(Y = 1 | P = p) of `current`. Interior entries only change.
std::vector<double> joint_alternating_update(const CollusionChannel& current,
                                             const TimeSharingDist& dist,
                                             const QuadratureConfig& cfg = {});

// ---------------------------------------------------------------------------
// Joint decoder, class D.

// theta*(p) = p^c / (p^c + (1-p)^c), shared by every interior coordinate.
double joint_classd_theta(int c, double p);
ClassDStrategy worst_joint_classd(int c);

// 1 / (c 2^(c-1)) bits, reached with all the mass at p = 1/2.
double capacity_classd_joint(int c);

// ---------------------------------------------------------------------------
// Simple decoder, class D.

// (1-p)^(c-2) (1 - c p) + p^(c-1)
double null_rate_polynomial(int c, double p);

// Left end of the interval [eta_c, 1 - eta_c] on which the p-aware attack
// cancels the simple-decoder rate. Requires c >= 3.
double eta_c(int c);

// h_b(g1) - p h_b(g2) - (1-p) h_b(g3) in bits for theta = (0, t, 0, ..., 0, 1).
double simple_classd_line_objective(int c, double p, double t);

// argmin over t in [0, 1] of simple_classd_line_objective: a grid of
// `grid_points` followed by golden-section refinement on the winning cell.
double simple_classd_line_search(int c, double p, int grid_points);

ClassDStrategy worst_simple_classd(int c, const SolverConfig& cfg = {});

// ---------------------------------------------------------------------------
// Simple decoder, classes B and C: multistart projected gradient search.

enum class SearchSpace { ClassB, ClassC };

struct RestartRecord {
  std::vector<double> theta;
  double rate_bits;
  int iterations;
  bool converged;
};

struct SimpleWorstResult {
  CollusionChannel channel;
  double rate_bits;
  SolverDiagnostics diagnostics;
  std::vector<RestartRecord> restarts;
  // Filled by full-box searches on symmetric laws: rate of the class-B
  // restricted search and the largest |theta_s - (1 - theta_{c-s})| of the
  // full-box winner.
  std::optional<double> class_b_rate_bits;
  std::optional<double> asymmetry;
};

SimpleWorstResult worst_simple_bc(int c, const TimeSharingDist& dist, const SolverConfig& cfg = {},
                                  SearchSpace space = SearchSpace::ClassC);

// rate_simple (bits) and its gradient in theta (bits), c + 1 entries; the
// two pinned endpoints get their formal partial derivatives as well.
double simple_rate_with_gradient(const CollusionChannel& ch, const TimeSharingDist& dist,
                                 std::span<double> gradient, const QuadratureConfig& cfg = {});

// ---------------------------------------------------------------------------
// Bernstein projection of q_conv(p) = 2 arcsin(sqrt(p)) / pi.

double q_conv(double p);

// theta with theta_0 = 0, theta_c = 1 and
// int_0^1 (Pr(Y=1|P=p) - q_conv(p)) B_{c,sigma}(p) dp = 0 for sigma in [1, c-1].
// The projection is unconstrained: from c = 7 on some entries leave [0, 1],
// so the raw c + 1 coefficients are returned rather than a CollusionChannel.
std::vector<double> conv_projection_attack(int c);

// || sum_s theta_s B_{c,s} - q_conv ||_2 over [0, 1], c = theta.size() - 1.
double conv_l2_distance(std::span<const double> theta);

}  // namespace collrates
