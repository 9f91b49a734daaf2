#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "ucalib/types.hpp"

namespace ucalib::synth {

// Gaussian clusters around centroids on a sphere, scored by a distance-based
// softmax surrogate. sharpness above the matched value makes the surrogate
// overconfident; pass_noise perturbs logits independently per pass.
struct SynthConfig {
  std::size_t classes = 10;
  std::size_t per_class = 600;
  std::size_t dim = 16;
  double separation = 2.4;   // centroid sphere radius
  double spread = 1.0;       // within-class isotropic stddev
  std::size_t passes = 20;
  double sharpness = 5.25;   // logit scale (gamma)
  double pass_noise = 0.10;  // logit noise scale (sigma)
  std::uint64_t seed = 1;

  void validate() const;  // throws DomainError on an invalid field
};

struct SynthData {
  FeatureMatrix features;
  LabelVector labels;
  Matrix centroids;  // classes x dim
};

// Deterministic under cfg.seed; samples are grouped by class.
SynthData generate(const SynthConfig& cfg);

// Per pass t and sample n: logits_c = -sharpness * dist(x_n, centroid_c) + noise,
// row = softmax(logits). pass_noise == 0 makes all passes bitwise identical.
PredictionStack simulate_passes(const FeatureMatrix& features, const Matrix& centroids,
                                const SynthConfig& cfg);

// In-memory benchmark bundle: the four splits with features, labels and stacks.
struct SplitData {
  FeatureMatrix features;
  LabelVector labels;
  PredictionStack stack;
};

struct Benchmark {
  SplitData train;
  SplitData conformal;
  SplitData calibration;
  SplitData test;
  SplitIndices indices;
};

Benchmark make_benchmark_data(const SynthConfig& cfg, const SplitSpec& split);

// On-disk bundle: one directory per split plus manifest.json with the config,
// split sizes and per-file content digests.
struct BundleSummary {
  std::filesystem::path dir;
  std::size_t train_size = 0;
  std::size_t conformal_size = 0;
  std::size_t calibration_size = 0;
  std::size_t test_size = 0;
  std::map<std::string, std::string> digests;  // bundle-relative path -> fnv1a64 hex
};

BundleSummary make_benchmark(const SynthConfig& cfg, const SplitSpec& split,
                             const std::filesystem::path& out_dir);

}  // namespace ucalib::synth
