#include "ucalib/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ucalib/csv.hpp"
#include "ucalib/data_model.hpp"
#include "ucalib/digest.hpp"
#include "ucalib/errors.hpp"
#include "ucalib/rng.hpp"
#include "ucalib/version.hpp"

namespace ucalib::synth {
namespace {

constexpr std::uint64_t kGenerateStream = 0x67656e;  // distinct RNG streams
constexpr std::uint64_t kPassStream = 0x706173;

using nlohmann::json;

json config_to_json(const SynthConfig& cfg) {
  return json{{"classes", cfg.classes},   {"per_class", cfg.per_class},
              {"dim", cfg.dim},           {"separation", cfg.separation},
              {"spread", cfg.spread},     {"passes", cfg.passes},
              {"sharpness", cfg.sharpness}, {"pass_noise", cfg.pass_noise},
              {"seed", cfg.seed}};
}

}  // namespace

void SynthConfig::validate() const {
  if (classes < 2) throw DomainError("SynthConfig: need at least 2 classes");
  if (per_class == 0) throw DomainError("SynthConfig: per_class must be positive");
  if (dim == 0) throw DomainError("SynthConfig: dim must be positive");
  if (!(separation > 0.0)) throw DomainError("SynthConfig: separation must be positive");
  if (spread < 0.0) throw DomainError("SynthConfig: spread must be non-negative");
  if (passes == 0) throw DomainError("SynthConfig: need at least 1 pass");
  if (!(sharpness > 0.0)) throw DomainError("SynthConfig: sharpness must be positive");
  if (pass_noise < 0.0) throw DomainError("SynthConfig: pass_noise must be non-negative");
}

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(derive_seed(cfg.seed, kGenerateStream));
  GaussianSampler gauss;

  // Centroids on a sphere of radius = separation.
  Matrix centroids(cfg.classes, cfg.dim);
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t j = 0; j < cfg.dim; ++j) {
        const double v = gauss.next(rng);
        centroids(c, j) = v;
        norm2 += v * v;
      }
    } while (norm2 < 1e-24);
    const double scale = cfg.separation / std::sqrt(norm2);
    for (std::size_t j = 0; j < cfg.dim; ++j) centroids(c, j) *= scale;
  }

  const std::size_t n = cfg.classes * cfg.per_class;
  Matrix features(n, cfg.dim);
  std::vector<int> labels(n);
  std::size_t row = 0;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    for (std::size_t s = 0; s < cfg.per_class; ++s, ++row) {
      labels[row] = static_cast<int>(c);
      for (std::size_t j = 0; j < cfg.dim; ++j)
        features(row, j) = centroids(c, j) + cfg.spread * gauss.next(rng);
    }
  }
  return SynthData{FeatureMatrix::checked(std::move(features)),
                   LabelVector::checked(std::move(labels), cfg.classes),
                   std::move(centroids)};
}

PredictionStack simulate_passes(const FeatureMatrix& features, const Matrix& centroids,
                                const SynthConfig& cfg) {
  cfg.validate();
  if (centroids.rows() != cfg.classes || centroids.cols() != features.dim())
    throw DomainError("simulate_passes: centroid shape does not match config/features");
  const std::size_t n = features.samples();
  const std::size_t c = cfg.classes;

  // Distances do not depend on the pass; compute once.
  Matrix base_logits(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = features.row(i);
    for (std::size_t j = 0; j < c; ++j) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < x.size(); ++f) {
        const double diff = x[f] - centroids(j, f);
        d2 += diff * diff;
      }
      base_logits(i, j) = -cfg.sharpness * std::sqrt(d2);
    }
  }

  std::mt19937_64 rng(derive_seed(cfg.seed, kPassStream));
  GaussianSampler gauss;
  std::vector<Matrix> passes;
  passes.reserve(cfg.passes);
  std::vector<double> logits(c);
  for (std::size_t t = 0; t < cfg.passes; ++t) {
    Matrix pass(n, c);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        logits[j] = base_logits(i, j);
        if (cfg.pass_noise > 0.0) logits[j] += cfg.pass_noise * gauss.next(rng);
      }
      const double peak = *std::max_element(logits.begin(), logits.end());
      double sum = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        pass(i, j) = std::exp(logits[j] - peak);
        sum += pass(i, j);
      }
      for (std::size_t j = 0; j < c; ++j) pass(i, j) /= sum;
    }
    passes.push_back(std::move(pass));
  }
  return PredictionStack::checked(std::move(passes));
}

Benchmark make_benchmark_data(const SynthConfig& cfg, const SplitSpec& split) {
  const SynthData data = generate(cfg);
  const PredictionStack stack = simulate_passes(data.features, data.centroids, cfg);
  const SplitIndices indices = make_split(data.features.samples(), split);

  auto carve = [&](const std::vector<std::size_t>& idx) {
    return SplitData{gather_rows(data.features, idx), gather_rows(data.labels, idx),
                     gather_rows(stack, idx)};
  };
  Benchmark bench{carve(indices.train), carve(indices.conformal),
                  carve(indices.calibration), carve(indices.test), indices};
  return bench;
}

BundleSummary make_benchmark(const SynthConfig& cfg, const SplitSpec& split,
                             const std::filesystem::path& out_dir) {
  const Benchmark bench = make_benchmark_data(cfg, split);
  std::filesystem::create_directories(out_dir);

  BundleSummary summary;
  summary.dir = out_dir;
  summary.train_size = bench.train.features.samples();
  summary.conformal_size = bench.conformal.features.samples();
  summary.calibration_size = bench.calibration.features.samples();
  summary.test_size = bench.test.features.samples();

  const std::pair<const char*, const SplitData*> splits[] = {
      {"train", &bench.train},
      {"conformal", &bench.conformal},
      {"calibration", &bench.calibration},
      {"test", &bench.test}};
  for (const auto& [name, part] : splits) {
    const auto dir = out_dir / name;
    std::filesystem::create_directories(dir);
    write_feature_matrix(dir / "features.csv", part->features);
    write_labels(dir / "labels.csv", part->labels);
    write_stack(dir, part->stack);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const auto rel = std::string(name) + "/" + entry.path().filename().string();
      summary.digests[rel] = fnv1a64_file(entry.path());
    }
  }

  json manifest;
  manifest["format"] = "ucalib-bundle";
  manifest["version"] = std::string(kVersion);
  manifest["config"] = config_to_json(cfg);
  manifest["split"] = {{"train", split.train},
                       {"conformal", split.conformal},
                       {"calibration", split.calibration},
                       {"test", split.test},
                       {"seed", split.seed}};
  manifest["sizes"] = {{"train", summary.train_size},
                       {"conformal", summary.conformal_size},
                       {"calibration", summary.calibration_size},
                       {"test", summary.test_size}};
  manifest["digests"] = summary.digests;
  std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + (out_dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
  return summary;
}

}  // namespace ucalib::synth
