// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels on the calibrated stub corpus and on random
// image sets. Run with --benchmark_filter to pick a kernel.
#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "groundseq/annotate.hpp"
#include "groundseq/eval.hpp"
#include "groundseq/filter.hpp"

using namespace groundseq;

namespace {

const fixtures::Corpus& corpus() {
  static const fixtures::Corpus c = fixtures::calibrated_corpus(7, 400);
  return c;
}

const std::vector<VideoRecord>& retained() {
  static const std::vector<VideoRecord> v = [] {
    const gateway::StubGateway gw(corpus().stub);
    return filter::run_filters_serial(corpus().videos, gw, filter::FilterConfig{}).retained;
  }();
  return v;
}

std::vector<ImageBuffer> images(int n, int side) {
  rng::Rng rng(42);
  std::vector<ImageBuffer> out;
  for (int i = 0; i < n; ++i) {
    ImageBuffer b(side, side);
    for (auto& p : b.data) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    out.push_back(std::move(b));
  }
  return out;
}

void BM_FilterSerial(benchmark::State& state) {
  const gateway::StubGateway gw(corpus().stub);
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter::run_filters_serial(corpus().videos, gw, filter::FilterConfig{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().videos.size()));
}

void BM_FilterParallel(benchmark::State& state) {
  const gateway::StubGateway gw(corpus().stub);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter::run_filters(corpus().videos, gw, filter::FilterConfig{}, workers));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().videos.size()));
}

void BM_AnnotateSerial(benchmark::State& state) {
  const gateway::StubGateway gw(corpus().stub);
  for (auto _ : state) {
    benchmark::DoNotOptimize(annotate::annotate_corpus_serial(retained(), gw, annotate::AnnotationConfig{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(retained().size()));
}

void BM_AnnotateParallel(benchmark::State& state) {
  const gateway::StubGateway gw(corpus().stub);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(annotate::annotate_corpus(retained(), gw, annotate::AnnotationConfig{}, workers));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(retained().size()));
}

void BM_DiversitySerial(benchmark::State& state) {
  const gateway::StubGateway gw(gateway::StubConfig{});
  const auto xs = images(static_cast<int>(state.range(0)), 256);
  for (auto _ : state) benchmark::DoNotOptimize(eval::pairwise_diversity_serial(xs, gw));
}

void BM_DiversityParallel(benchmark::State& state) {
  const gateway::StubGateway gw(gateway::StubConfig{});
  const auto xs = images(static_cast<int>(state.range(0)), 256);
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(eval::pairwise_diversity(xs, gw, 100.0, workers));
}

}  // namespace

BENCHMARK(BM_FilterSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FilterParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AnnotateSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AnnotateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiversitySerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiversityParallel)->Args({8, 2})->Args({8, 8})->Args({16, 2})->Args({16, 8})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
