#include "collrates/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "collrates/entropy.hpp"
#include "collrates/parallel.hpp"
#include "collrates/rng.hpp"

namespace collrates {
namespace {

struct BlockStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
};

// Chan et al. pairwise merge of running moments.
void merge(BlockStats& into, const BlockStats& other) {
  if (other.n == 0) return;
  const double total = static_cast<double>(into.n + other.n);
  const double delta = other.mean - into.mean;
  into.mean += delta * static_cast<double>(other.n) / total;
  into.m2 += other.m2 + delta * delta * static_cast<double>(into.n) * static_cast<double>(other.n) / total;
  into.n += other.n;
}

std::int64_t block_count(std::int64_t samples) { return (samples + kMcBlock - 1) / kMcBlock; }

std::int64_t block_size(std::int64_t samples, std::int64_t block) {
  return std::min(kMcBlock, samples - block * kMcBlock);
}

// Index of the atom of a discrete law by inverse cdf.
std::size_t sample_atom(const std::vector<SupportPoint>& support, std::mt19937_64& engine) {
  const double u = uniform01(engine);
  double cdf = 0.0;
  for (std::size_t a = 0; a + 1 < support.size(); ++a) {
    cdf += support[a].weight;
    if (u < cdf) return a;
  }
  return support.size() - 1;
}

McEstimate rao_blackwell(Decoder decoder, const Attack& attack, const TimeSharingDist& dist,
                         std::int64_t samples, std::uint64_t seed) {
  const auto blocks = parallel_map(static_cast<std::size_t>(block_count(samples)), [&](std::size_t b) {
    auto engine = make_stream(seed, "mc-rate", b);
    BlockStats stats;
    const std::int64_t n = block_size(samples, static_cast<std::int64_t>(b));
    for (std::int64_t i = 0; i < n; ++i) {
      const double p = sample_time_sharing(dist, engine);
      const double r = r_point(decoder, attack_at(attack, p), p);
      ++stats.n;
      const double delta = r - stats.mean;
      stats.mean += delta / static_cast<double>(stats.n);
      stats.m2 += delta * (r - stats.mean);
    }
    return stats;
  });
  BlockStats total;
  for (const BlockStats& b : blocks) merge(total, b);
  const double var = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
  // At a single atom every pointwise rate is identical and the sample spread
  // is zero; keep the reported error strictly positive at the rounding level.
  const double floor = 1e-14 * std::max(1.0, std::abs(total.mean));
  const double err = std::max(std::sqrt(var / static_cast<double>(total.n)), floor);
  return McEstimate{total.mean, err, samples, seed};
}

// counts[(atom * (zs) + z) * 2 + y]
double plug_in_mi_bits(const std::vector<std::int64_t>& counts, std::size_t atoms, std::size_t zs) {
  std::int64_t total = 0;
  for (auto v : counts) total += v;
  if (total == 0) return 0.0;
  double mi = 0.0;
  for (std::size_t a = 0; a < atoms; ++a) {
    std::int64_t na = 0;
    std::int64_t ny[2] = {0, 0};
    std::vector<std::int64_t> nz(zs, 0);
    for (std::size_t z = 0; z < zs; ++z) {
      for (int y = 0; y < 2; ++y) {
        const auto v = counts[(a * zs + z) * 2 + static_cast<std::size_t>(y)];
        na += v;
        ny[y] += v;
        nz[z] += v;
      }
    }
    if (na == 0) continue;
    double ia = 0.0;
    for (std::size_t z = 0; z < zs; ++z) {
      for (int y = 0; y < 2; ++y) {
        const auto v = counts[(a * zs + z) * 2 + static_cast<std::size_t>(y)];
        if (v == 0) continue;
        ia += static_cast<double>(v) *
              std::log(static_cast<double>(v) * static_cast<double>(na) /
                       (static_cast<double>(nz[z]) * static_cast<double>(ny[y])));
      }
    }
    mi += ia / static_cast<double>(total);
  }
  return to_bits(mi);
}

McEstimate plug_in(Decoder decoder, const Attack& attack, const TimeSharingDist& dist,
                   std::int64_t samples, std::uint64_t seed) {
  if (dist.is_continuous()) {
    throw CapabilityError("plug-in estimator requires a discrete time-sharing law");
  }
  const auto& support = dist.support();
  const int c = attack_size(attack);
  const std::size_t atoms = support.size();
  const std::size_t zs = decoder == Decoder::Joint ? static_cast<std::size_t>(c + 1) : 2;
  std::vector<CollusionChannel> channels;
  for (const SupportPoint& s : support) channels.push_back(attack_at(attack, s.p));

  const auto blocks = parallel_map(static_cast<std::size_t>(block_count(samples)), [&](std::size_t b) {
    auto engine = make_stream(seed, "mc-plugin", b);
    std::vector<std::int64_t> counts(atoms * zs * 2, 0);
    const std::int64_t n = block_size(samples, static_cast<std::int64_t>(b));
    for (std::int64_t i = 0; i < n; ++i) {
      const std::size_t a = sample_atom(support, engine);
      const double p = support[a].p;
      int sigma = 0;
      int first = 0;
      for (int j = 0; j < c; ++j) {
        const int x = uniform01(engine) < p ? 1 : 0;
        if (j == 0) first = x;
        sigma += x;
      }
      const int y = uniform01(engine) < channels[a][sigma] ? 1 : 0;
      const std::size_t z = decoder == Decoder::Joint ? static_cast<std::size_t>(sigma)
                                                      : static_cast<std::size_t>(first);
      ++counts[(a * zs + z) * 2 + static_cast<std::size_t>(y)];
    }
    return counts;
  });

  std::vector<std::int64_t> pooled(atoms * zs * 2, 0);
  std::vector<double> per_block;
  for (const auto& counts : blocks) {
    for (std::size_t i = 0; i < pooled.size(); ++i) pooled[i] += counts[i];
    per_block.push_back(plug_in_mi_bits(counts, atoms, zs));
  }
  const double scale = decoder == Decoder::Joint ? 1.0 / c : 1.0;
  const double mi = plug_in_mi_bits(pooled, atoms, zs) * scale;
  // Spread of the per-block estimates; with a single block fall back to the
  // rounding floor.
  double err = 1e-14;
  if (per_block.size() > 1) {
    double mean = 0.0;
    for (double v : per_block) mean += v;
    mean /= static_cast<double>(per_block.size());
    double ss = 0.0;
    for (double v : per_block) ss += (v - mean) * (v - mean);
    const double k = static_cast<double>(per_block.size());
    err = std::max(err, scale * std::sqrt(ss / (k - 1.0) / k));
  }
  return McEstimate{mi, err, samples, seed};
}

}  // namespace

int attack_size(const Attack& attack) {
  return std::visit([](const auto& a) { return a.c(); }, attack);
}

CollusionChannel attack_at(const Attack& attack, double p) {
  if (const auto* ch = std::get_if<CollusionChannel>(&attack)) return *ch;
  return std::get<ClassDStrategy>(attack)(p);
}

double sample_time_sharing(const TimeSharingDist& dist, std::mt19937_64& engine) {
  switch (dist.kind()) {
    case DistKind::Tardos: {
      const double s = std::sin(0.5 * std::numbers::pi * uniform01(engine));
      return s * s;
    }
    case DistKind::Flat:
      return uniform01(engine);
    case DistKind::DiracPair:
    case DistKind::Discrete:
      return dist.support()[sample_atom(dist.support(), engine)].p;
  }
  return 0.5;
}

CodeMatrix generate_code(int n, int m, const TimeSharingDist& dist, std::uint64_t seed) {
  if (n < 1 || m < 1) throw InvalidArgument("code needs n >= 1 users and m >= 1 symbols");
  CodeMatrix code;
  code.n = n;
  code.m = m;
  code.p_seq.resize(static_cast<std::size_t>(m));
  code.bits.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  auto p_engine = make_stream(seed, "code-p");
  for (double& p : code.p_seq) p = sample_time_sharing(dist, p_engine);
  auto bit_engine = make_stream(seed, "code-bits");
  for (int i = 0; i < m; ++i) {
    const double p = code.p_seq[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      code.bits[static_cast<std::size_t>(j) * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)] =
          uniform01(bit_engine) < p ? 1 : 0;
    }
  }
  return code;
}

std::vector<std::uint8_t> apply_collusion(const CodeMatrix& code, std::span<const int> colluders,
                                          const Attack& attack, std::uint64_t seed) {
  if (static_cast<int>(colluders.size()) != attack_size(attack)) {
    throw InvalidArgument("collusion size mismatch: " + std::to_string(colluders.size()) +
                          " colluders for a c=" + std::to_string(attack_size(attack)) + " channel");
  }
  for (std::size_t a = 0; a < colluders.size(); ++a) {
    if (colluders[a] < 0 || colluders[a] >= code.n) throw InvalidArgument("colluder index out of range");
    for (std::size_t b = 0; b < a; ++b) {
      if (colluders[a] == colluders[b]) throw InvalidArgument("duplicate colluder index");
    }
  }
  const auto* fixed = std::get_if<CollusionChannel>(&attack);
  auto engine = make_stream(seed, "pirate");
  std::vector<std::uint8_t> y(static_cast<std::size_t>(code.m));
  for (int i = 0; i < code.m; ++i) {
    int sigma = 0;
    for (int j : colluders) sigma += code.at(j, i);
    const double u = uniform01(engine);
    const double theta = fixed ? (*fixed)[sigma]
                               : std::get<ClassDStrategy>(attack)(code.p_seq[static_cast<std::size_t>(i)])[sigma];
    y[static_cast<std::size_t>(i)] = u < theta ? 1 : 0;
  }
  return y;
}

std::int64_t marking_violations(const CodeMatrix& code, std::span<const int> colluders,
                                std::span<const std::uint8_t> y) {
  std::int64_t bad = 0;
  for (int i = 0; i < code.m; ++i) {
    bool seen = false;
    for (int j : colluders) seen = seen || code.at(j, i) == y[static_cast<std::size_t>(i)];
    if (!seen) ++bad;
  }
  return bad;
}

McEstimate estimate_mi(Decoder decoder, const Attack& attack, const TimeSharingDist& dist,
                       std::int64_t samples, std::uint64_t seed, Estimator estimator) {
  if (samples < kMinMcSamples) {
    throw InvalidArgument("Monte-Carlo estimate needs at least " + std::to_string(kMinMcSamples) + " samples");
  }
  return estimator == Estimator::RaoBlackwell ? rao_blackwell(decoder, attack, dist, samples, seed)
                                              : plug_in(decoder, attack, dist, samples, seed);
}

}  // namespace collrates
