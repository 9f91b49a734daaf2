#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ucalib/types.hpp"

namespace ucalib {

struct WeightedPoint {
  double score = 0.0;
  double target = 0.0;
  double weight = 1.0;
};

// Monotone non-decreasing step function fitted by PAVA. Prediction is a
// right-continuous lookup with block boundaries at midpoints between
// adjacent distinct training scores; queries outside the training range
// clamp to the first/last block value.
class IsotonicModel {
 public:
  double predict(double score) const;

  const std::vector<double>& boundaries() const noexcept { return boundaries_; }
  const std::vector<double>& block_values() const noexcept { return block_values_; }
  std::pair<double, double> training_range() const noexcept { return training_range_; }

  // Reassembles a model from serialized parts, re-checking the invariants.
  static IsotonicModel from_parts(std::vector<double> boundaries,
                                  std::vector<double> block_values,
                                  std::pair<double, double> training_range);

 private:
  friend IsotonicModel pava_fit(std::span<const WeightedPoint> points);
  IsotonicModel() = default;
  std::vector<double> boundaries_;     // strictly increasing, size = blocks - 1
  std::vector<double> block_values_;   // non-decreasing fitted values
  std::pair<double, double> training_range_{0.0, 0.0};
};

// Weighted least-squares isotonic fit. Duplicate scores are pre-merged into
// one weighted point, which makes the solution unique and order-independent.
IsotonicModel pava_fit(std::span<const WeightedPoint> points);

// Eq-style target mixing toward the uniform distribution:
// target_i = beta * p_i + (1 - beta) / classes.
std::vector<double> underconfidence_targets(std::span<const double> probs, double beta,
                                            std::size_t classes);

enum class CalibratorMode { standard, underconfident };

// One isotonic model per class (one-vs-rest); apply() transforms each class
// column and renormalizes rows.
class MulticlassCalibrator {
 public:
  CalibratorMode mode() const noexcept { return mode_; }
  double beta() const noexcept { return beta_; }  // meaningful in underconfident mode
  std::size_t classes() const noexcept { return models_.size(); }
  const IsotonicModel& model(std::size_t c) const { return models_[c]; }

  ProbMatrix apply(const ProbMatrix& probs) const;

  std::string to_json_string() const;
  static MulticlassCalibrator from_json_string(const std::string& text);

 private:
  friend MulticlassCalibrator fit_standard(const ProbMatrix&, const LabelVector&);
  friend MulticlassCalibrator fit_underconfident(const ProbMatrix&, double);
  MulticlassCalibrator(CalibratorMode mode, double beta, std::vector<IsotonicModel> models)
      : mode_(mode), beta_(beta), models_(std::move(models)) {}

  CalibratorMode mode_ = CalibratorMode::standard;
  double beta_ = 1.0;
  std::vector<IsotonicModel> models_;
};

// Per-class fits against true-label indicator targets.
MulticlassCalibrator fit_standard(const ProbMatrix& probs, const LabelVector& labels);

// Per-class fits against beta-mixed targets; labels are unused by construction.
MulticlassCalibrator fit_underconfident(const ProbMatrix& probs, double beta);

}  // namespace ucalib
