#pragma once

#include <cstdint>
#include <vector>

#include "ucalib/matrix.hpp"

namespace ucalib {

// Ingest tolerance for row-stochastic data (accommodates float32 dumps).
inline constexpr double kRowSumTolerance = 1e-6;

// Row-stochastic N x C matrix. Immutable after construction.
class ProbMatrix {
 public:
  // Validates entries in [0, 1] and row sums within kRowSumTolerance.
  static ProbMatrix checked(Matrix values);

  std::size_t samples() const noexcept { return values_.rows(); }
  std::size_t classes() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  double at(std::size_t i, std::size_t c) const { return values_(i, c); }
  const Matrix& values() const noexcept { return values_; }

 private:
  explicit ProbMatrix(Matrix values) : values_(std::move(values)) {}
  Matrix values_;
};

// T stochastic passes over the same N x C sample block.
class PredictionStack {
 public:
  // Validates T >= 1, C >= 2, uniform shape and per-(t, n) row stochasticity;
  // errors name the offending pass and sample.
  static PredictionStack checked(std::vector<Matrix> passes);

  std::size_t passes() const noexcept { return passes_.size(); }
  std::size_t samples() const noexcept { return passes_.front().rows(); }
  std::size_t classes() const noexcept { return passes_.front().cols(); }
  const Matrix& pass(std::size_t t) const { return passes_[t]; }

 private:
  explicit PredictionStack(std::vector<Matrix> passes) : passes_(std::move(passes)) {}
  std::vector<Matrix> passes_;
};

// N class indices in {0, ..., C-1}.
class LabelVector {
 public:
  static LabelVector checked(std::vector<int> labels, std::size_t classes);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t classes() const noexcept { return classes_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& values() const noexcept { return labels_; }

 private:
  LabelVector(std::vector<int> labels, std::size_t classes)
      : labels_(std::move(labels)), classes_(classes) {}
  std::vector<int> labels_;
  std::size_t classes_ = 0;
};

// N x d real matrix with all entries finite.
class FeatureMatrix {
 public:
  static FeatureMatrix checked(Matrix values);

  std::size_t samples() const noexcept { return values_.rows(); }
  std::size_t dim() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  const Matrix& values() const noexcept { return values_; }

 private:
  explicit FeatureMatrix(Matrix values) : values_(std::move(values)) {}
  Matrix values_;
};

// Fractions for the four-way partition plus the shuffle seed.
struct SplitSpec {
  double train = 0.55;
  double conformal = 0.15;
  double calibration = 0.15;
  double test = 0.15;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> conformal;
  std::vector<std::size_t> calibration;
  std::vector<std::size_t> test;
};

}  // namespace ucalib
