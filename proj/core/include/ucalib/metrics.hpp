#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ucalib/types.hpp"

namespace ucalib {

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double confidence = 0.0;  // mean max-probability of members
  double accuracy = 0.0;    // fraction of correct members
};

struct ReliabilityBins {
  std::vector<ReliabilityBin> bins;  // equal-width on [0, 1], last closed at 1
  std::size_t total = 0;
};

// Equal-width binning of top-1 confidence; correctness from argmax (ties low).
ReliabilityBins reliability_bins(const ProbMatrix& probs, const LabelVector& labels,
                                 std::size_t num_bins);

// Same binning with externally supplied correctness (e.g. fixed pre-calibration
// predictions).
ReliabilityBins reliability_bins(const std::vector<double>& confidences,
                                 const std::vector<bool>& correctness, std::size_t num_bins);

std::vector<double> max_prob_confidences(const ProbMatrix& probs);

double ece(const ReliabilityBins& bins);
double mce(const ReliabilityBins& bins);

// Mean squared difference against one-hot labels, summed over classes.
double brier(const ProbMatrix& probs, const LabelVector& labels);

struct ClassificationScores {
  double accuracy = 0.0;
  double macro_f1 = 0.0;  // classes absent from both sides contribute F1 = 0
};

ClassificationScores classification_scores(const ProbMatrix& probs, const LabelVector& labels);
ClassificationScores classification_scores(const LabelVector& predicted,
                                           const LabelVector& labels);

// Certain means entropy strictly below tau; the boundary case is uncertain.
struct UncertaintyConfusion {
  std::size_t tc = 0;  // correct and certain
  std::size_t tu = 0;  // incorrect and uncertain
  std::size_t fc = 0;  // incorrect but certain
  std::size_t fu = 0;  // correct but uncertain
  double tau = 0.0;
  std::size_t total() const noexcept { return tc + tu + fc + fu; }
};

UncertaintyConfusion uncertainty_confusion(const std::vector<bool>& correctness,
                                           const std::vector<double>& entropies, double tau);

// Rates with zero denominators are undefined rather than zero; an undefined
// input propagates into the G-mean.
struct UncertaintyScores {
  double uacc = 0.0;
  std::optional<double> utpr;
  std::optional<double> ufpr;
  std::optional<double> ug_mean;
};

UncertaintyScores uncertainty_scores(const UncertaintyConfusion& confusion);

struct SweepRow {
  UncertaintyConfusion confusion;
  UncertaintyScores scores;
};

// One row per threshold; taus must be sorted ascending.
std::vector<SweepRow> threshold_sweep(const std::vector<bool>& correctness,
                                      const std::vector<double>& entropies,
                                      std::span<const double> taus);

}  // namespace ucalib
