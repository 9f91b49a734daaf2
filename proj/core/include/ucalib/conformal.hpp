#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ucalib/types.hpp"

namespace ucalib {

struct ConformalConfig {
  std::size_t k = 20;
  double alpha = 0.01;  // miscoverage rate, in (0, 1)
};

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

// Exact brute-force Euclidean index over the conformal set. Nonconformity
// scores 1 - p_true are precomputed once at build time.
class NeighborIndex {
 public:
  static NeighborIndex build(FeatureMatrix features, LabelVector labels,
                             const ProbMatrix& mean_probs);

  std::size_t size() const noexcept { return features_.samples(); }
  std::size_t dim() const noexcept { return features_.dim(); }
  std::span<const double> nonconformity() const noexcept { return nonconformity_; }
  const FeatureMatrix& features() const noexcept { return features_; }
  const LabelVector& labels() const noexcept { return labels_; }

  // k smallest Euclidean distances, ascending, ties broken by lower index.
  std::vector<Neighbor> knn(std::span<const double> query, std::size_t k) const;

 private:
  NeighborIndex(FeatureMatrix features, LabelVector labels, std::vector<double> scores);
  FeatureMatrix features_;
  LabelVector labels_;
  std::vector<double> nonconformity_;
};

// m-th smallest score with m = ceil((1 - alpha) * k), clamped to [1, k].
double conformal_quantile(std::span<const double> scores, double alpha);

// Classes whose nonconformity 1 - p_c does not exceed the quantile.
std::vector<std::size_t> prediction_set(std::span<const double> mean_prob_row, double q);

// Per-sample singleton-matching outcome. flag true implies set_size == 1.
struct StratificationFlags {
  std::vector<bool> flags;              // true = putatively correct
  std::vector<std::size_t> set_sizes;   // |Gamma(x)|
  std::vector<double> quantiles;        // q_{1-alpha}(x)
};

// Retrieves the neighborhood, derives the per-sample quantile and prediction
// set, and flags a sample putatively correct exactly when the set is the
// singleton {predicted label}. Empty sets are putatively incorrect.
StratificationFlags stratify(const NeighborIndex& index, const FeatureMatrix& queries,
                             const ProbMatrix& mean_probs, const LabelVector& predicted,
                             const ConformalConfig& config);

// Group sizes and per-group accuracy, both in percent. Accuracy of an empty
// group is undefined.
struct StratificationReport {
  double correct_size_pct = 0.0;
  std::optional<double> correct_accuracy_pct;
  double incorrect_size_pct = 0.0;
  std::optional<double> incorrect_accuracy_pct;
};

StratificationReport stratification_report(const std::vector<bool>& flags,
                                           const std::vector<bool>& correctness);

}  // namespace ucalib
