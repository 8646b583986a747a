#include <benchmark/benchmark.h>

#include <cmath>

#include "nlwlab/counter_rng.hpp"
#include "nlwlab/cutoff.hpp"
#include "nlwlab/distribution.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/nonlinearity.hpp"
#include "nlwlab/propagator.hpp"
#include "nlwlab/randomize.hpp"
#include "nlwlab/solver.hpp"

using namespace nlwlab;

namespace {

RealField noise(const Grid& g) {
  RealField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = keyed_normal({1, 0}, i, 0, 0);
  return f;
}

// Smooth band-limited pair for the solver benchmarks.
FieldPair smooth_pair(const Grid& g) {
  SpectralField a = fft_forward(noise(g));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= std::exp(-std::pow(g.frequency_norm(i) / 0.4, 2));
  NonlinearForce(g, g.dim(), default_dealias_rule(g.dim())).project(a);
  const double s = 0.5 / fft_inverse(a).max_abs();
  a *= s;
  return {a, SpectralField(g)};
}

}  // namespace

// Real-to-complex round trip; args: dimension, points per axis.
static void BM_FftRoundTrip(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 8.0);
  const RealField f = noise(g);
  std::vector<Complex> spec(g.size());
  std::vector<double> back(g.size());
  for (auto _ : state) {
    fft_forward(g, f.values(), spec);
    fft_inverse(g, spec, back);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_FftRoundTrip)->Args({2, 64})->Args({2, 256})->Args({4, 16})->Args({4, 32})->Args({5, 12})
    ->Unit(benchmark::kMicrosecond);

static void BM_LinearEvolve(benchmark::State& state) {
  const Grid g(4, static_cast<int>(state.range(0)), 8.0);
  FieldPair p = smooth_pair(g);
  const auto cache = PropagatorCache::get(g, 0.01);
  for (auto _ : state) {
    linear_evolve_inplace(p, *cache);
    benchmark::DoNotOptimize(p.pos.coeffs().data());
  }
}
BENCHMARK(BM_LinearEvolve)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

// Dealiased force evaluation; args: dimension, points, rule.
static void BM_NonlinearForce(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 8.0);
  const auto rule = static_cast<DealiasRule>(state.range(2));
  NonlinearForce force(g, g.dim(), rule);
  const FieldPair p = smooth_pair(g);
  SpectralField out(g);
  for (auto _ : state) {
    force.apply(p.pos.coeffs(), out.coeffs());
    benchmark::DoNotOptimize(out.coeffs().data());
  }
}
BENCHMARK(BM_NonlinearForce)
    ->Args({4, 16, static_cast<int>(DealiasRule::two_thirds)})
    ->Args({4, 32, static_cast<int>(DealiasRule::two_thirds)})
    ->Args({5, 12, static_cast<int>(DealiasRule::padded_three_halves)})
    ->Unit(benchmark::kMillisecond);

// Ten splitting steps of the unforced equation.
static void BM_StrangSteps(benchmark::State& state) {
  const Grid g(4, static_cast<int>(state.range(0)), 8.0);
  const FieldPair p = smooth_pair(g);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.1;
  cfg.sample_stride = 10;
  for (auto _ : state) benchmark::DoNotOptimize(strang_evolve(p, cfg).energy.back());
}
BENCHMARK(BM_StrangSteps)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

// One randomized pair; arg: cutoff kind.
static void BM_Randomize(benchmark::State& state) {
  const Grid g(4, 16, 8.0);
  const auto kind = state.range(0) == 0 ? CutoffKind::smooth : CutoffKind::sharp;
  const CutoffFamily cutoff(kind, g);
  const CoefficientDistribution dist;
  const FieldPair p = smooth_pair(g);
  std::uint64_t index = 0;
  for (auto _ : state) {
    const RandomizedDraw draw = RandomizedDraw::generate({3, index++}, dist, cutoff);
    benchmark::DoNotOptimize(randomize_pair(p, cutoff, dist, draw).pos.coeffs().data());
  }
}
BENCHMARK(BM_Randomize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
