#include <benchmark/benchmark.h>

#include "fssaudit/bias.hpp"
#include "fssaudit/features.hpp"
#include "fssaudit/scoring.hpp"
#include "fssaudit/synthgen.hpp"

using namespace fssaudit;

namespace {

// One corpus shared by every benchmark: 8 SDS x 300 researchers, 400 competitions.
struct Fixture {
  Corpus corpus;
  BaselineTable baselines;
  ScoreBook scores;
  EligibleSet eligible;
  std::vector<CompetitionView> views;

  Fixture() {
    GenConfig cfg;
    cfg.seed = 1;
    cfg.n_sds = 8;
    cfg.n_udas = 4;
    cfg.researchers_per_sds = 300;
    cfg.competitions_per_sds = 50;
    corpus = generate(cfg).corpus;
    baselines = compute_baselines(corpus, cfg.productivity_window);
    scores = score_corpus(corpus, cfg.productivity_window);
    eligible = filter_eligible(corpus, scores);
    views = competition_views(corpus, scores, eligible);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_FssKernel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(fss_kernel(f.corpus, f.baselines, {2004, 2008}, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.corpus.researchers.size()));
}

void BM_FeatureTable(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_feature_table(f.corpus, f.scores, f.eligible, {}, mode(state)));
}

void BM_DetectAll(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(detect_all(f.views, 20.0, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.views.size()));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP path.
BENCHMARK(BM_FssKernel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeatureTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectAll)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
