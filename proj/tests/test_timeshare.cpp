#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "collrates/entropy.hpp"
#include "collrates/timeshare.hpp"

using namespace collrates;

namespace {

double hb_bits(double p) { return to_bits(binary_entropy(p)); }

const TimeSharingDist kAll[] = {
    TimeSharingDist::tardos(), TimeSharingDist::flat(), TimeSharingDist::dirac_pair(0.5),
    TimeSharingDist::dirac_pair(0.2), TimeSharingDist::discrete({{0.1, 0.25}, {0.6, 0.75}}),
};

}  // namespace

TEST(Expect, binary_entropy_under_tardos) {
  EXPECT_NEAR(expect(TimeSharingDist::tardos(), hb_bits), 2.0 - std::numbers::log2e, 1e-10);
}

TEST(Expect, binary_entropy_under_flat) {
  EXPECT_NEAR(expect(TimeSharingDist::flat(), hb_bits), std::numbers::log2e / 2.0, 1e-10);
}

TEST(Expect, trivial_means) {
  EXPECT_DOUBLE_EQ(expect(TimeSharingDist::dirac_pair(0.5), [](double p) { return p; }), 0.5);
  EXPECT_NEAR(expect(TimeSharingDist::flat(), [](double p) { return p; }), 0.5, 1e-14);
  EXPECT_NEAR(expect(TimeSharingDist::tardos(), [](double p) { return p; }), 0.5, 1e-14);
}

TEST(Expect, discrete_is_exact_weighted_sum) {
  const auto d = TimeSharingDist::discrete({{0.1, 0.25}, {0.6, 0.75}});
  EXPECT_DOUBLE_EQ(expect(d, [](double p) { return p * p; }), 0.25 * 0.01 + 0.75 * 0.36);
}

TEST(Expect, normalization_all_kinds) {
  for (const auto& d : kAll) EXPECT_NEAR(expect(d, [](double) { return 1.0; }), 1.0, 1e-12) << d.selector();
}

TEST(Expect, symmetric_kinds_are_mirror_invariant) {
  auto g = [](double p) { return std::exp(3.0 * p) * hb_bits(p) + p * p * p; };
  auto mirrored = [&](double p) { return g(1.0 - p); };
  for (const auto& d : {TimeSharingDist::tardos(), TimeSharingDist::flat(), TimeSharingDist::dirac_pair(0.3)}) {
    EXPECT_NEAR(expect(d, g), expect(d, mirrored), 1e-10) << d.selector();
  }
}

TEST(Expect, doubling_nodes_changes_little) {
  QuadratureConfig base;
  QuadratureConfig twice;
  twice.tardos_nodes = 2 * base.tardos_nodes;
  twice.flat_nodes = 2 * base.flat_nodes;
  auto g = [](double p) { return hb_bits(p) - p * hb_bits(0.5 * p + 0.25); };
  for (const auto& d : {TimeSharingDist::tardos(), TimeSharingDist::flat()}) {
    EXPECT_NEAR(expect(d, g, base), expect(d, g, twice), base.tolerance_bits) << d.selector();
  }
}

// E[P^k] = C(2k, k) / 4^k under the arcsine law.
TEST(Expect, tardos_rule_exact_on_polynomials) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> a(21);
  for (double& v : a) v = coef(rng);
  double exact = 0.0;
  double moment = 1.0;
  for (int k = 0; k <= 20; ++k) {
    exact += a[static_cast<std::size_t>(k)] * moment;
    moment *= (2.0 * k + 1.0) / (2.0 * k + 2.0);
  }
  const double got = expect(TimeSharingDist::tardos(), [&](double p) {
    double s = 0.0;
    for (int k = 20; k >= 0; --k) s = s * p + a[static_cast<std::size_t>(k)];
    return s;
  });
  EXPECT_NEAR(got, exact, 1e-12);
}

TEST(Expect, non_finite_integrand_reports_node) {
  try {
    expect(TimeSharingDist::flat(), [](double p) { return p > 0.5 ? std::nan("") : 0.0; });
    FAIL() << "no exception";
  } catch (const IntegrandError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("integrand failure at p=", 0), 0u) << e.what();
  }
}

TEST(Density, formulas) {
  EXPECT_NEAR(density(TimeSharingDist::tardos(), 0.5).value, 2.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(density(TimeSharingDist::tardos(), 0.25).value, 4.0 / (std::numbers::pi * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(density(TimeSharingDist::tardos(), 0.25).value, 0.7351, 1e-4);
  EXPECT_EQ(density(TimeSharingDist::flat(), 0.3).value, 1.0);
  EXPECT_FALSE(density(TimeSharingDist::flat(), 0.3).point_mass);
}

TEST(Density, symmetric) {
  for (double p : {0.01, 0.2, 0.37}) {
    EXPECT_DOUBLE_EQ(density(TimeSharingDist::tardos(), p).value, density(TimeSharingDist::tardos(), 1 - p).value);
  }
}

TEST(Density, point_masses) {
  const auto d = TimeSharingDist::dirac_pair(0.2);
  EXPECT_TRUE(density(d, 0.2).point_mass);
  EXPECT_DOUBLE_EQ(density(d, 0.2).value, 0.5);
  EXPECT_DOUBLE_EQ(density(d, 0.8).value, 0.5);
  EXPECT_DOUBLE_EQ(density(d, 0.5).value, 0.0);
  EXPECT_DOUBLE_EQ(density(TimeSharingDist::dirac_pair(0.5), 0.5).value, 1.0);
}

TEST(Density, tardos_endpoint_singularity) {
  for (double p : {0.0, 1.0}) {
    try {
      density(TimeSharingDist::tardos(), p);
      FAIL();
    } catch (const InvalidArgument& e) {
      EXPECT_NE(std::string(e.what()).find("endpoint singularity"), std::string::npos);
    }
  }
}

TEST(Dist, selectors_round_trip) {
  for (const auto& d : kAll) {
    const auto back = TimeSharingDist::parse(d.selector());
    EXPECT_EQ(back.selector(), d.selector());
    EXPECT_EQ(back.kind(), d.kind());
  }
  EXPECT_EQ(TimeSharingDist::parse("dirac:0.25").dirac_p0(), 0.25);
}

TEST(Dist, invalid_inputs) {
  EXPECT_THROW(TimeSharingDist::parse("gauss"), InvalidArgument);
  EXPECT_THROW(TimeSharingDist::parse("dirac:0.7"), InvalidArgument);
  EXPECT_THROW(TimeSharingDist::parse("dirac:0"), InvalidArgument);
  EXPECT_THROW(TimeSharingDist::parse("dirac:x"), InvalidArgument);
  EXPECT_THROW(TimeSharingDist::parse("discrete:0.2:0.5,0.4:0.4"), InvalidArgument);
  EXPECT_THROW(TimeSharingDist::parse("discrete:1.2:1"), InvalidArgument);
  EXPECT_THROW(TimeSharingDist::parse("discrete:0.2:-1,0.3:2"), InvalidArgument);
  EXPECT_THROW(TimeSharingDist::parse("discrete:"), InvalidArgument);
}

TEST(Dist, symmetry_flags) {
  EXPECT_TRUE(TimeSharingDist::tardos().is_symmetric());
  EXPECT_TRUE(TimeSharingDist::flat().is_symmetric());
  EXPECT_TRUE(TimeSharingDist::dirac_pair(0.1).is_symmetric());
  EXPECT_FALSE(TimeSharingDist::discrete({{0.1, 0.25}, {0.6, 0.75}}).is_symmetric());
  EXPECT_TRUE(TimeSharingDist::discrete({{0.1, 0.5}, {0.9, 0.5}}).is_symmetric());
}

TEST(Dist, dirac_half_is_single_atom) {
  const auto d = TimeSharingDist::dirac_pair(0.5);
  const auto& s = d.support();
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].p, 0.5);
  EXPECT_EQ(s[0].weight, 1.0);
}

TEST(GaussLegendre, integrates_degree_2n_minus_1) {
  std::vector<double> x, w;
  gauss_legendre(7, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 12);
  EXPECT_NEAR(s, 2.0 / 13.0, 1e-15);
  EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
}
