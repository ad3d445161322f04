#include <benchmark/benchmark.h>

#include "lplab/corpus.hpp"
#include "lplab/decompose.hpp"
#include "lplab/filters.hpp"
#include "lplab/norms.hpp"
#include "lplab/sparse.hpp"
#include "lplab/square.hpp"
#include "lplab/weights.hpp"

using namespace lplab;

namespace {

GridFunction fixture(const GridSpec& spec, std::uint64_t seed,
                     std::vector<std::size_t> vshape = {}) {
  CorpusRecipe r = recipe_by_name("mix");
  r.count = 1;
  r.band_cap = 16;
  r.vshape = std::move(vshape);
  return generate_corpus(spec, r, seed)[0];
}

Collection full_tree(int scale) {
  std::vector<DyadicCube> cubes;
  for (int s = 0; s <= scale; ++s)
    for (std::uint32_t p = 0; p < (1u << s); ++p) cubes.push_back({1, s, {p}});
  return Collection(1, cubes);
}

void BM_BandConvolveAll1d(benchmark::State& state) {
  GridSpec spec({static_cast<int>(state.range(0))}, {1});
  GridFunction f = fixture(spec, 1);
  FilterBank bank =
      build_filterbank(spec, 0, 1, 0, spec.min_logres() - 1, "smooth-bump");
  for (auto _ : state) benchmark::DoNotOptimize(band_convolve_all(f, bank));
}
BENCHMARK(BM_BandConvolveAll1d)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TensorSquareFunction(benchmark::State& state) {
  int L = static_cast<int>(state.range(0));
  GridSpec spec({L, L}, {1, 1});
  GridFunction f = fixture(spec, 2);
  TensorFilterBank tb = build_tensor_filterbank(spec, {1, 1}, "smooth-bump");
  for (auto _ : state) benchmark::DoNotOptimize(tensor_square_function(f, tb));
}
BENCHMARK(BM_TensorSquareFunction)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MaximalFunction(benchmark::State& state) {
  int L = static_cast<int>(state.range(0));
  GridSpec spec({L, L}, {1, 1});
  Weight w = make_power_weight(spec, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(maximal_function(w.w));
}
BENCHMARK(BM_MaximalFunction)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MixedNorm(benchmark::State& state) {
  GridSpec spec({8, 8}, {1, 1});
  GridFunction f = fixture(spec, 3, {8});
  MixedNormSpec ns;
  ns.p = {0.5, 2.0};
  ns.q = {0.7};
  for (auto _ : state) benchmark::DoNotOptimize(mixed_norm(f, ns));
}
BENCHMARK(BM_MixedNorm)->Unit(benchmark::kMillisecond);

void BM_SparseConstruct(benchmark::State& state) {
  GridSpec spec({10}, {1});
  Collection tree = full_tree(static_cast<int>(state.range(0)));
  LacunaryFamily fam = build_lacunary_family(spec, tree, "haar", 2.0);
  CoefficientMap coeffs = analyze(fixture(spec, 4), fam);
  Weight w = make_power_weight(spec, 0.25);
  for (auto _ : state)
    benchmark::DoNotOptimize(sparse_construct(spec, coeffs, tree, w, 1.0));
}
BENCHMARK(BM_SparseConstruct)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ApCharacteristic(benchmark::State& state) {
  GridSpec spec({static_cast<int>(state.range(0))}, {1});
  Weight w = make_power_weight(spec, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(ap_characteristic(w, 2.0));
}
BENCHMARK(BM_ApCharacteristic)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
