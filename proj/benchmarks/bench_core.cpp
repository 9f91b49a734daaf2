#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ucalib/conformal.hpp"
#include "ucalib/data_model.hpp"
#include "ucalib/dual.hpp"
#include "ucalib/isotonic.hpp"
#include "ucalib/metrics.hpp"
#include "ucalib/rng.hpp"
#include "ucalib/synth.hpp"

using namespace ucalib;

namespace {

std::vector<WeightedPoint> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<WeightedPoint> pts(n);
  for (auto& p : pts) p = {uniform_double(rng), uniform_double(rng), 1.0};
  return pts;
}

void BM_pava_fit(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    auto model = pava_fit(pts);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_pava_fit)->Arg(1000)->Arg(10000)->Arg(100000);

NeighborIndex make_index(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(11);
  Matrix f(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) f(i, c) = uniform_double(rng);
  Matrix probs(n, 2, 0.5);
  return NeighborIndex::build(FeatureMatrix::checked(std::move(f)),
                              LabelVector::checked(std::vector<int>(n, 0), 2),
                              ProbMatrix::checked(std::move(probs)));
}

void BM_knn_query(benchmark::State& state) {
  const auto index = make_index(static_cast<std::size_t>(state.range(0)), 16);
  std::mt19937_64 rng(13);
  std::vector<double> query(16);
  for (auto& v : query) v = uniform_double(rng);
  for (auto _ : state) {
    auto nn = index.knn(query, 20);
    benchmark::DoNotOptimize(nn);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_knn_query)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_dual_infer(benchmark::State& state) {
  synth::SynthConfig cfg;
  cfg.per_class = static_cast<std::size_t>(state.range(0));
  cfg.seed = 17;
  SplitSpec split;
  split.seed = 17;
  auto bench = synth::make_benchmark_data(cfg, split);
  auto conf_mean = mean_over_passes(bench.conformal.stack);
  auto index =
      NeighborIndex::build(bench.conformal.features, bench.conformal.labels, conf_mean);
  auto cal_mean = mean_over_passes(bench.calibration.stack);
  ConformalConfig config{20, 0.1};
  auto cal_flags = stratify(index, bench.calibration.features, cal_mean,
                            argmax_labels(cal_mean), config);
  auto dual = fit_dual(cal_mean, bench.calibration.labels, cal_flags, 0.9, config);
  for (auto _ : state) {
    auto out = dual.infer(index, bench.test.features, bench.test.stack);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * bench.test.features.samples());
}
BENCHMARK(BM_dual_infer)->Arg(100)->Arg(600);

void BM_ece(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(19);
  std::vector<double> conf(n);
  std::vector<bool> correct(n);
  for (std::size_t i = 0; i < n; ++i) {
    conf[i] = uniform_double(rng);
    correct[i] = uniform_double(rng) < conf[i];
  }
  for (auto _ : state) {
    auto value = ece(reliability_bins(conf, correct, 15));
    benchmark::DoNotOptimize(value);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ece)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
