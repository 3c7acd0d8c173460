#include <benchmark/benchmark.h>

#include "reidtk/aro.hpp"
#include "reidtk/datagen.hpp"
#include "reidtk/dmon.hpp"
#include "reidtk/pipeline.hpp"

namespace {

using namespace reidtk;

datagen::SynthData dataset(std::size_t ids) {
  datagen::SynthSpec spec;
  spec.num_ids = ids;
  return datagen::generate(spec);
}

void BM_Enhance(benchmark::State& state) {
  const auto data = dataset(static_cast<std::size_t>(state.range(0)));
  dmon::DmonConfig cfg;
  cfg.k1 = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dmon::enhance(data.gallery, cfg));
  state.counters["rows"] = static_cast<double>(data.gallery.rows());
}
BENCHMARK(BM_Enhance)->ArgsProduct({{100, 500}, {2, 5}})->Unit(benchmark::kMillisecond);

void BM_Optimize(benchmark::State& state) {
  const auto data = dataset(static_cast<std::size_t>(state.range(0)));
  aro::AroConfig cfg;
  cfg.k2 = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(aro::optimize(data.query, data.gallery, cfg));
  state.counters["gallery"] = static_cast<double>(data.gallery.rows());
}
BENCHMARK(BM_Optimize)->ArgsProduct({{100, 500}, {2, 20}})->Unit(benchmark::kMillisecond);

// The literal route: dense filtered matrices and a dense product.
void BM_OptimizeDense(benchmark::State& state) {
  const auto data = dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto pair = aro::build_distance_pair(data.query, data.gallery);
    benchmark::DoNotOptimize(aro::asymmetric_similarity(aro::neighborhood_filter(pair.query_gallery, 20, 1.0),
                                                        aro::neighborhood_filter(pair.gallery_gallery, 20, 1.0)));
  }
}
BENCHMARK(BM_OptimizeDense)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Rerank(benchmark::State& state) {
  const auto data = dataset(static_cast<std::size_t>(state.range(0)));
  const pipeline::PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::rerank(data.query, data.gallery, cfg));
}
BENCHMARK(BM_Rerank)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
