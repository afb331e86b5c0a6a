#include <benchmark/benchmark.h>

#include "alp/approx.hpp"
#include "alp/families.hpp"
#include "alp/gallery.hpp"

using namespace alp;

static void BM_AlphaNormFinite(benchmark::State& state) {
  Rng rng(1);
  const SpacePtr s = random_finite_space(rng, static_cast<std::size_t>(state.range(0)));
  const MeasurableFn f = random_function(s, rng);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_norm_pow(f, 2.0).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AlphaNormFinite)->RangeMultiplier(8)->Range(8, 1 << 15)->Complexity();

static void BM_PowerTailIntegral(benchmark::State& state) {
  const SpacePtr s = make_space({}, {TailFamily::power(1.0, 2.0, 1)});
  MeasurableFn f(s);
  f.set_tail(0, {TailPiece::power(1, 1.0, 0.1)});
  for (auto _ : state) benchmark::DoNotOptimize(integrate_p(f, 1.5).value);
}
BENCHMARK(BM_PowerTailIntegral);

static void BM_VariationalBruteForce(benchmark::State& state) {
  Rng rng(2);
  const SpacePtr s = random_finite_space(rng, static_cast<std::size_t>(state.range(0)));
  const MeasurableFn f = random_function(s, rng);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_norm_variational_identity(f, 1.5).passed());
}
BENCHMARK(BM_VariationalBruteForce)->DenseRange(4, 16, 4);

static void BM_Membership(benchmark::State& state) {
  const SpacePtr s = dyadic_atoms_space();
  const MeasurableFn f = dyadic_growth_function(s, 2.0);
  const std::vector<double> deltas = default_member_deltas();
  for (auto _ : state) benchmark::DoNotOptimize(lambda_p_member(f, 2.0, deltas).verdict);
}
BENCHMARK(BM_Membership);

static void BM_ImplicationMatrix(benchmark::State& state) {
  const FnSequence seq = n_chi_shrinking(state.range(0));
  CheckOptions o;
  o.tol = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(implication_matrix(seq, 1.0, o, false).violations.size());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ImplicationMatrix)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_Mollify1D(benchmark::State& state) {
  GridBox b;
  b.lo[0] = -2.0;
  b.hi[0] = 2.0;
  b.cells[0] = state.range(0);
  const GridFn f = GridFn::sample(b, [](const std::array<double, 3>& x) { return x[0] * x[0] < 1.0 ? 1.0 : 0.0; });
  for (auto _ : state) benchmark::DoNotOptimize(mollify(f, 1.0, 0.1).lp_distance);
}
BENCHMARK(BM_Mollify1D)->Arg(200)->Arg(800)->Arg(3200)->Arg(12800);

static void BM_Mollify2D(benchmark::State& state) {
  GridBox b;
  b.dim = 2;
  b.cells = {state.range(0), state.range(0), 1};
  const GridFn f = GridFn::sample(b, [](const std::array<double, 3>& x) { return x[0] < 0.5 && x[1] < 0.5 ? 1.0 : 0.0; });
  for (auto _ : state) benchmark::DoNotOptimize(mollify(f, 1.0, 4 * b.side(0)).lp_distance);
}
BENCHMARK(BM_Mollify2D)->Arg(32)->Arg(64)->Arg(128);

static void BM_GalleryUnboundedBall(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_entry("unbounded_ball", {{"p", 2.0}, {"d", 2.0}}).passed());
}
BENCHMARK(BM_GalleryUnboundedBall)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
