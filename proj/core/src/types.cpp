#include "ucalib/types.hpp"

#include <cmath>
#include <string>

namespace ucalib {
namespace {

void check_prob_row(std::span<const double> row, const std::string& where) {
  double sum = 0.0;
  for (std::size_t c = 0; c < row.size(); ++c) {
    const double v = row[c];
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError(where + ": entry " + std::to_string(c) + " = " +
                            std::to_string(v) + " outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance)
    throw ValidationError(where + ": row sums to " + std::to_string(sum) +
                          ", expected 1 within 1e-6");
}

}  // namespace

ProbMatrix ProbMatrix::checked(Matrix values) {
  if (values.rows() == 0 || values.cols() < 2)
    throw ValidationError("ProbMatrix: need at least 1 sample and 2 classes");
  for (std::size_t i = 0; i < values.rows(); ++i)
    check_prob_row(values.row(i), "ProbMatrix sample " + std::to_string(i));
  return ProbMatrix(std::move(values));
}

PredictionStack PredictionStack::checked(std::vector<Matrix> passes) {
  if (passes.empty()) throw ValidationError("PredictionStack: need at least 1 pass");
  const std::size_t n = passes.front().rows();
  const std::size_t c = passes.front().cols();
  if (n == 0 || c < 2)
    throw ValidationError("PredictionStack: need at least 1 sample and 2 classes");
  for (std::size_t t = 0; t < passes.size(); ++t) {
    if (passes[t].rows() != n || passes[t].cols() != c)
      throw ValidationError("PredictionStack: pass " + std::to_string(t) +
                            " has shape " + std::to_string(passes[t].rows()) + "x" +
                            std::to_string(passes[t].cols()) + ", expected " +
                            std::to_string(n) + "x" + std::to_string(c));
    for (std::size_t i = 0; i < n; ++i)
      check_prob_row(passes[t].row(i),
                     "PredictionStack pass " + std::to_string(t) + ", sample " +
                         std::to_string(i));
  }
  return PredictionStack(std::move(passes));
}

LabelVector LabelVector::checked(std::vector<int> labels, std::size_t classes) {
  if (classes < 2) throw ValidationError("LabelVector: need at least 2 classes");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
      throw ValidationError("LabelVector: label " + std::to_string(labels[i]) +
                            " at row " + std::to_string(i) + " outside {0, ..., " +
                            std::to_string(classes - 1) + "}");
  }
  return LabelVector(std::move(labels), classes);
}

FeatureMatrix FeatureMatrix::checked(Matrix values) {
  if (values.rows() == 0 || values.cols() == 0)
    throw ValidationError("FeatureMatrix: empty");
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (double v : values.row(i)) {
      if (!std::isfinite(v))
        throw ValidationError("FeatureMatrix: non-finite entry at row " +
                              std::to_string(i));
    }
  }
  return FeatureMatrix(std::move(values));
}

}  // namespace ucalib
