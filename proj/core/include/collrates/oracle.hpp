#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "collrates/collusion.hpp"
#include "collrates/rates.hpp"
#include "collrates/timeshare.hpp"

// Monte-Carlo counterpart of the rates module: simulated codes, simulated
// pirates, and sample estimates of the same mutual informations.
namespace collrates {

using Attack = std::variant<CollusionChannel, ClassDStrategy>;

int attack_size(const Attack& attack);
// theta at a given p (fixed channels ignore p).
CollusionChannel attack_at(const Attack& attack, double p);

struct McEstimate {
  double mi_bits = 0.0;
  double std_err_bits = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

// bits[j * m + i] is user j's symbol at index i.
struct CodeMatrix {
  int n = 0;
  int m = 0;
  std::vector<std::uint8_t> bits;
  std::vector<double> p_seq;

  std::uint8_t at(int user, int index) const {
    return bits[static_cast<std::size_t>(user) * static_cast<std::size_t>(m) +
                static_cast<std::size_t>(index)];
  }
};

// One draw of P.
double sample_time_sharing(const TimeSharingDist& dist, std::mt19937_64& engine);

CodeMatrix generate_code(int n, int m, const TimeSharingDist& dist, std::uint64_t seed);

// Pirated sequence: Y_i ~ Bernoulli(theta_{Sigma_i}) with theta re-evaluated at
// p_seq[i] for p-aware strategies.
std::vector<std::uint8_t> apply_collusion(const CodeMatrix& code, std::span<const int> colluders,
                                          const Attack& attack, std::uint64_t seed);

// Indices where Y is not among the colluders' symbols.
std::int64_t marking_violations(const CodeMatrix& code, std::span<const int> colluders,
                                std::span<const std::uint8_t> y);

enum class Estimator {
  // Sample mean of the exact pointwise rate at sampled P.
  RaoBlackwell,
  // Empirical conditional mutual information from simulated (P, Sigma or X, Y)
  // counts. Discrete laws only.
  PlugIn,
};

inline constexpr std::int64_t kMinMcSamples = 10000;
inline constexpr std::int64_t kMcBlock = 1 << 16;

// Samples are drawn in fixed blocks with one random stream per block, so the
// estimate does not depend on the number of worker threads.
McEstimate estimate_mi(Decoder decoder, const Attack& attack, const TimeSharingDist& dist,
                       std::int64_t samples, std::uint64_t seed,
                       Estimator estimator = Estimator::RaoBlackwell);

}  // namespace collrates
