#include <benchmark/benchmark.h>

#include "pfwd/analysis.hpp"
#include "pfwd/forwarding.hpp"
#include "pfwd/pointproc.hpp"
#include "pfwd/rgg.hpp"

using namespace pfwd;

namespace {

SimDomain domain_for(const benchmark::State& state) {
  return {static_cast<double>(state.range(0)), 4.5, 1.0};
}

void BM_SamplePpp(benchmark::State& state) {
  const SimDomain d = domain_for(state);
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_ppp(d, {1, t++, 0}));
  state.counters["points"] = d.expected_points();
}
BENCHMARK(BM_SamplePpp)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_BuildRgg(benchmark::State& state) {
  const PointSet pts = sample_ppp(domain_for(state), {1, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(build_rgg(pts));
}
BENCHMARK(BM_BuildRgg)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_Components(benchmark::State& state) {
  const Rgg g = build_rgg(sample_ppp(domain_for(state), {1, 0, 0}));
  std::vector<std::uint8_t> mask(g.size());
  const CounterRng marks = derive_stream({1, 0, 1});
  for (std::size_t v = 0; v < g.size(); ++v) mask[v] = marks.uniform_at(v) < 0.6;
  for (auto _ : state) benchmark::DoNotOptimize(components(g.graph, mask));
}
BENCHMARK(BM_Components)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_ForwardOnePacket(benchmark::State& state) {
  const Rgg g = build_rgg(sample_ppp(domain_for(state), {1, 0, 0}));
  std::uint64_t j = 1;
  for (auto _ : state) benchmark::DoNotOptimize(forward_one_packet(g, 0.6, derive_stream({1, 0, j++})));
}
BENCHMARK(BM_ForwardOnePacket)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_ReceptionThresholds(benchmark::State& state) {
  const Rgg g = build_rgg(sample_ppp(domain_for(state), {1, 0, 0}));
  std::uint64_t j = 1;
  for (auto _ : state) benchmark::DoNotOptimize(reception_thresholds(g.graph, g.source(), derive_stream({1, 0, j++})));
}
BENCHMARK(BM_ReceptionThresholds)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_CrnProfile(benchmark::State& state) {
  const SimDomain d{51.0, 4.5, 1.0};
  std::vector<int> ns;
  for (int n = 20; n <= 40; ++n) ns.push_back(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(CrnProfile(d, 20, ns, {1, 2, 1}, 1, Condition::kNone, 0.32, 1.0, 11));
  }
}
BENCHMARK(BM_CrnProfile)->Unit(benchmark::kMillisecond);

void BM_BinomialTail(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(binomial_tail(n, 0.7, n / 2));
}
BENCHMARK(BM_BinomialTail)->Arg(40)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
