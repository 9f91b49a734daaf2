#pragma once

#include <span>
#include <vector>

#include "ucalib/types.hpp"

namespace ucalib {

// Empirical mean over the T passes of a stack.
ProbMatrix mean_over_passes(const PredictionStack& stack);

// Shannon entropy of a probability row scaled by 1/ln(C) into [0, 1],
// with the convention 0*ln(0) = 0. Requires row.size() >= 2.
double normalized_entropy(std::span<const double> row);

std::vector<double> normalized_entropies(const ProbMatrix& probs);

// Divides each row by its sum; rows with sum < 1e-12 become uniform.
// Negative entries are a domain error.
ProbMatrix renormalize(const Matrix& m);

// Index of the row maximum, ties to the lowest class index.
std::size_t argmax_row(std::span<const double> row);

LabelVector argmax_labels(const ProbMatrix& probs);

// Deterministic four-way partition of {0, ..., n-1}. Subset sizes are
// floor(fraction * n) with the remainder assigned to train; an empty
// subset is a configuration error. Requires n >= 4.
SplitIndices make_split(std::size_t n, const SplitSpec& spec);

// Row-gather helpers used when carving splits out of whole-dataset containers.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx);
ProbMatrix gather_rows(const ProbMatrix& m, std::span<const std::size_t> idx);
FeatureMatrix gather_rows(const FeatureMatrix& m, std::span<const std::size_t> idx);
LabelVector gather_rows(const LabelVector& labels, std::span<const std::size_t> idx);
PredictionStack gather_rows(const PredictionStack& stack, std::span<const std::size_t> idx);

}  // namespace ucalib
