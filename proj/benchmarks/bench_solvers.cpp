#include <benchmark/benchmark.h>

#include "collrates/oracle.hpp"
#include "collrates/rates.hpp"
#include "collrates/worst.hpp"

using namespace collrates;

static void BM_RateJointClassA(benchmark::State& state) {
  const auto ch = CollusionChannel::class_a(static_cast<int>(state.range(0)));
  const auto d = TimeSharingDist::tardos();
  for (auto _ : state) benchmark::DoNotOptimize(rate_joint(ch, d));
}
BENCHMARK(BM_RateJointClassA)->Arg(3)->Arg(10)->Arg(50);

static void BM_WorstJointBC(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const auto d = TimeSharingDist::tardos();
  for (auto _ : state) benchmark::DoNotOptimize(worst_joint_bc(c, d).rate_bits);
}
BENCHMARK(BM_WorstJointBC)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_WorstSimpleBC(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const auto d = TimeSharingDist::tardos();
  for (auto _ : state) benchmark::DoNotOptimize(worst_simple_bc(c, d).rate_bits);
}
BENCHMARK(BM_WorstSimpleBC)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_EtaC(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eta_c(c));
}
BENCHMARK(BM_EtaC)->Arg(4)->Arg(10);

static void BM_SimpleClassDLineSearch(benchmark::State& state) {
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simple_classd_line_search(5, 0.1, grid));
}
BENCHMARK(BM_SimpleClassDLineSearch)->Arg(51)->Arg(1001);

static void BM_McRaoBlackwell(benchmark::State& state) {
  const Attack attack = CollusionChannel::class_a(4);
  const auto d = TimeSharingDist::tardos();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_mi(Decoder::Joint, attack, d, 100000, 1).mi_bits);
}
BENCHMARK(BM_McRaoBlackwell)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
