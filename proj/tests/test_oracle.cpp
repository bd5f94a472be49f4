#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "collrates/oracle.hpp"
#include "collrates/parallel.hpp"
#include "collrates/rng.hpp"
#include "collrates/worst.hpp"

using namespace collrates;

namespace {

const CollusionChannel kOdd({0.0, 0.2, 0.7, 0.4, 1.0});

// Pearson statistic of `samples` over `bins` equiprobable cells of the CDF.
template <class Cdf>
double chi_square(const std::vector<double>& samples, int bins, Cdf&& cdf) {
  std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
  for (double x : samples) {
    int b = static_cast<int>(cdf(x) * bins);
    count[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += 1.0;
  }
  const double expected = static_cast<double>(samples.size()) / bins;
  double stat = 0.0;
  for (double v : count) stat += (v - expected) * (v - expected) / expected;
  return stat;
}

struct ThreadEnv {
  explicit ThreadEnv(const char* n) { setenv("COLLRATES_THREADS", n, 1); }
  ~ThreadEnv() { unsetenv("COLLRATES_THREADS"); }
};

}  // namespace

TEST(Rng, streams_are_reproducible_and_distinct) {
  auto a = make_stream(1, "x", 0);
  auto b = make_stream(1, "x", 0);
  auto c = make_stream(1, "x", 1);
  auto d = make_stream(1, "y", 0);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
  auto e = make_stream(3, "u");
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(e);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

// 40 equiprobable cells, 39 degrees of freedom; 72 is the 0.999 quantile.
TEST(Sampling, tardos_law_chi_square) {
  auto engine = make_stream(9, "test");
  std::vector<double> xs(200000);
  for (double& x : xs) x = sample_time_sharing(TimeSharingDist::tardos(), engine);
  EXPECT_LT(chi_square(xs, 40, [](double p) { return 2.0 / M_PI * std::asin(std::sqrt(p)); }), 72.0);
}

TEST(Sampling, flat_law_chi_square) {
  auto engine = make_stream(9, "test");
  std::vector<double> xs(200000);
  for (double& x : xs) x = sample_time_sharing(TimeSharingDist::flat(), engine);
  EXPECT_LT(chi_square(xs, 40, [](double p) { return p; }), 72.0);
}

TEST(Sampling, discrete_frequencies) {
  const auto d = TimeSharingDist::discrete({{0.1, 0.25}, {0.6, 0.75}});
  auto engine = make_stream(4, "test");
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += sample_time_sharing(d, engine) == 0.1;
  EXPECT_NEAR(hits / double(n), 0.25, 4 * std::sqrt(0.25 * 0.75 / n));
}

TEST(Code, bits_follow_p) {
  const auto code = generate_code(50, 2000, TimeSharingDist::tardos(), 77);
  ASSERT_EQ(code.bits.size(), 100000u);
  double ones = 0.0;
  double expected = 0.0;
  for (int i = 0; i < code.m; ++i) {
    for (int j = 0; j < code.n; ++j) ones += code.at(j, i);
    expected += 50 * code.p_seq[static_cast<std::size_t>(i)];
  }
  EXPECT_NEAR(ones, expected, 4 * std::sqrt(100000 * 0.25));
  const auto again = generate_code(50, 2000, TimeSharingDist::tardos(), 77);
  EXPECT_EQ(code.bits, again.bits);
  EXPECT_EQ(code.p_seq, again.p_seq);
  EXPECT_NE(generate_code(50, 2000, TimeSharingDist::tardos(), 78).bits, code.bits);
  EXPECT_THROW(generate_code(0, 5, TimeSharingDist::flat(), 1), InvalidArgument);
}

TEST(Pirate, respects_marking_assumption) {
  const auto code = generate_code(20, 5000, TimeSharingDist::flat(), 5);
  const std::vector<int> who{2, 7, 11, 19};
  for (const Attack& attack : {Attack{kOdd}, Attack{worst_joint_classd(4)}, Attack{worst_simple_classd(4)}}) {
    const auto y = apply_collusion(code, who, attack, 6);
    EXPECT_EQ(marking_violations(code, who, y), 0);
  }
}

TEST(Pirate, output_frequency_matches_theta) {
  const auto code = generate_code(3, 20000, TimeSharingDist::dirac_pair(0.5), 8);
  const std::vector<int> who{0, 1, 2};
  const CollusionChannel ch({0.0, 0.3, 0.9, 1.0});
  const auto y = apply_collusion(code, who, Attack{ch}, 9);
  double hits[4] = {0, 0, 0, 0};
  double total[4] = {0, 0, 0, 0};
  for (int i = 0; i < code.m; ++i) {
    const int s = code.at(0, i) + code.at(1, i) + code.at(2, i);
    total[s] += 1;
    hits[s] += y[static_cast<std::size_t>(i)];
  }
  EXPECT_NEAR(hits[1] / total[1], 0.3, 0.02);
  EXPECT_NEAR(hits[2] / total[2], 0.9, 0.02);
  EXPECT_EQ(hits[0], 0);
  EXPECT_EQ(hits[3], total[3]);
}

TEST(Pirate, detects_violations_and_bad_input) {
  const auto code = generate_code(4, 100, TimeSharingDist::flat(), 5);
  const std::vector<int> who{0, 1};
  std::vector<std::uint8_t> flipped(100);
  for (int i = 0; i < 100; ++i) flipped[static_cast<std::size_t>(i)] = code.at(0, i) ? 0 : 1;
  std::int64_t expected = 0;
  for (int i = 0; i < 100; ++i) expected += code.at(0, i) == code.at(1, i);
  EXPECT_EQ(marking_violations(code, who, flipped), expected);

  const Attack c2{CollusionChannel::class_a(2)};
  const std::vector<int> three{0, 1, 2};
  const std::vector<int> dup{1, 1};
  const std::vector<int> out{0, 9};
  EXPECT_THROW(apply_collusion(code, three, c2, 1), InvalidArgument);
  EXPECT_THROW(apply_collusion(code, dup, c2, 1), InvalidArgument);
  EXPECT_THROW(apply_collusion(code, out, c2, 1), InvalidArgument);
}

TEST(Estimate, rao_blackwell_agrees_with_quadrature) {
  const auto d = TimeSharingDist::tardos();
  for (Decoder dec : {Decoder::Joint, Decoder::Simple}) {
    const auto e = estimate_mi(dec, Attack{kOdd}, d, 400000, 12);
    const double ref = rate(dec, kOdd, d);
    EXPECT_LT(std::abs(e.mi_bits - ref), 4 * e.std_err_bits) << to_string(dec);
    EXPECT_GT(e.std_err_bits, 0.0);
    EXPECT_EQ(e.samples, 400000);
    EXPECT_EQ(e.seed, 12u);
  }
}

TEST(Estimate, class_d_strategy) {
  const auto d = TimeSharingDist::flat();
  const auto s = worst_joint_classd(3);
  const auto e = estimate_mi(Decoder::Joint, Attack{s}, d, 200000, 3);
  EXPECT_LT(std::abs(e.mi_bits - rate_classd(s, Decoder::Joint, d)), 4 * e.std_err_bits);
}

TEST(Estimate, plug_in_at_dirac) {
  const auto d = TimeSharingDist::dirac_pair(0.5);
  for (Decoder dec : {Decoder::Joint, Decoder::Simple}) {
    const auto e = estimate_mi(dec, Attack{kOdd}, d, 500000, 21, Estimator::PlugIn);
    const double ref = r_point(dec, kOdd, 0.5);
    // plug-in bias is O(cells / n), far below the tolerance here
    EXPECT_LT(std::abs(e.mi_bits - ref), 5 * e.std_err_bits + 1e-4) << to_string(dec);
  }
}

TEST(Estimate, deterministic_and_thread_invariant) {
  const auto d = TimeSharingDist::tardos();
  McEstimate one, four;
  {
    ThreadEnv env("1");
    EXPECT_EQ(thread_count(), 1u);
    one = estimate_mi(Decoder::Simple, Attack{kOdd}, d, 300000, 5);
  }
  {
    ThreadEnv env("4");
    EXPECT_EQ(thread_count(), 4u);
    four = estimate_mi(Decoder::Simple, Attack{kOdd}, d, 300000, 5);
  }
  EXPECT_EQ(one.mi_bits, four.mi_bits);
  EXPECT_EQ(one.std_err_bits, four.std_err_bits);
  const auto other = estimate_mi(Decoder::Simple, Attack{kOdd}, d, 300000, 6);
  EXPECT_NE(one.mi_bits, other.mi_bits);
}

TEST(Estimate, errors) {
  EXPECT_THROW(estimate_mi(Decoder::Joint, Attack{kOdd}, TimeSharingDist::flat(), 100, 1), InvalidArgument);
  EXPECT_THROW(estimate_mi(Decoder::Joint, Attack{kOdd}, TimeSharingDist::flat(), 100000, 1, Estimator::PlugIn),
               CapabilityError);
}

TEST(Parallel, ordered_results_and_lowest_exception) {
  ThreadEnv env("3");
  const auto v = parallel_map(100, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  try {
    parallel_map(50, [](std::size_t i) -> int {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(Attack, helpers) {
  EXPECT_EQ(attack_size(Attack{kOdd}), 4);
  EXPECT_EQ(attack_size(Attack{worst_joint_classd(6)}), 6);
  EXPECT_EQ(attack_at(Attack{kOdd}, 0.3).to_string(), kOdd.to_string());
}
