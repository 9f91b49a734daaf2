#include "ucalib/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ucalib/data_model.hpp"
#include "ucalib/errors.hpp"

namespace ucalib {

std::vector<double> max_prob_confidences(const ProbMatrix& probs) {
  std::vector<double> out(probs.samples());
  for (std::size_t i = 0; i < probs.samples(); ++i) {
    const auto row = probs.row(i);
    out[i] = *std::max_element(row.begin(), row.end());
  }
  return out;
}

ReliabilityBins reliability_bins(const std::vector<double>& confidences,
                                 const std::vector<bool>& correctness,
                                 std::size_t num_bins) {
  if (num_bins == 0) throw DomainError("reliability_bins: need at least 1 bin");
  if (confidences.size() != correctness.size())
    throw DomainError("reliability_bins: length mismatch");
  ReliabilityBins out;
  out.total = confidences.size();
  out.bins.resize(num_bins);
  const double width = 1.0 / static_cast<double>(num_bins);
  for (std::size_t m = 0; m < num_bins; ++m) {
    out.bins[m].lo = static_cast<double>(m) * width;
    out.bins[m].hi = m + 1 == num_bins ? 1.0 : static_cast<double>(m + 1) * width;
  }
  std::vector<double> conf_sum(num_bins, 0.0);
  std::vector<std::size_t> hits(num_bins, 0);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    std::size_t m = static_cast<std::size_t>(
        std::floor(c * static_cast<double>(num_bins)));
    if (m >= num_bins) m = num_bins - 1;  // confidence 1.0 lands in the top bin
    ++out.bins[m].count;
    conf_sum[m] += c;
    if (correctness[i]) ++hits[m];
  }
  for (std::size_t m = 0; m < num_bins; ++m) {
    if (out.bins[m].count == 0) continue;
    const double cnt = static_cast<double>(out.bins[m].count);
    out.bins[m].confidence = conf_sum[m] / cnt;
    out.bins[m].accuracy = static_cast<double>(hits[m]) / cnt;
  }
  return out;
}

ReliabilityBins reliability_bins(const ProbMatrix& probs, const LabelVector& labels,
                                 std::size_t num_bins) {
  if (labels.size() != probs.samples())
    throw DomainError("reliability_bins: label count does not match sample count");
  std::vector<bool> correct(probs.samples());
  for (std::size_t i = 0; i < probs.samples(); ++i)
    correct[i] = argmax_row(probs.row(i)) == static_cast<std::size_t>(labels[i]);
  return reliability_bins(max_prob_confidences(probs), correct, num_bins);
}

double ece(const ReliabilityBins& bins) {
  if (bins.total == 0) throw DomainError("ece: no samples");
  double sum = 0.0;
  for (const ReliabilityBin& b : bins.bins)
    sum += static_cast<double>(b.count) * std::abs(b.accuracy - b.confidence);
  return sum / static_cast<double>(bins.total);
}

double mce(const ReliabilityBins& bins) {
  double worst = -1.0;
  for (const ReliabilityBin& b : bins.bins) {
    if (b.count == 0) continue;
    worst = std::max(worst, std::abs(b.accuracy - b.confidence));
  }
  if (worst < 0.0) throw DomainError("mce: all bins empty");
  return worst;
}

double brier(const ProbMatrix& probs, const LabelVector& labels) {
  if (labels.size() != probs.samples())
    throw DomainError("brier: label count does not match sample count");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.samples(); ++i) {
    const auto row = probs.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double y = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
      const double d = row[c] - y;
      sum += d * d;
    }
  }
  return sum / static_cast<double>(probs.samples());
}

ClassificationScores classification_scores(const LabelVector& predicted,
                                           const LabelVector& labels) {
  if (predicted.size() != labels.size())
    throw DomainError("classification_scores: length mismatch");
  if (predicted.classes() != labels.classes())
    throw DomainError("classification_scores: class counts differ");
  if (predicted.size() == 0) throw DomainError("classification_scores: no samples");
  const std::size_t classes = labels.classes();
  std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto p = static_cast<std::size_t>(predicted[i]);
    const auto y = static_cast<std::size_t>(labels[i]);
    if (p == y) {
      ++tp[y];
      ++correct;
    } else {
      ++fp[p];
      ++fn[y];
    }
  }
  // F1 = 2TP / (2TP + FP + FN); a class absent from both predictions and
  // labels contributes 0 and stays in the mean.
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    if (denom > 0.0) f1_sum += 2.0 * static_cast<double>(tp[c]) / denom;
  }
  ClassificationScores scores;
  scores.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  scores.macro_f1 = f1_sum / static_cast<double>(classes);
  return scores;
}

ClassificationScores classification_scores(const ProbMatrix& probs,
                                           const LabelVector& labels) {
  return classification_scores(argmax_labels(probs), labels);
}

UncertaintyConfusion uncertainty_confusion(const std::vector<bool>& correctness,
                                           const std::vector<double>& entropies,
                                           double tau) {
  if (correctness.size() != entropies.size())
    throw DomainError("uncertainty_confusion: length mismatch");
  if (!(tau >= 0.0 && tau <= 1.0))
    throw DomainError("uncertainty_confusion: tau must be in [0, 1]");
  UncertaintyConfusion out;
  out.tau = tau;
  for (std::size_t i = 0; i < correctness.size(); ++i) {
    const bool certain = entropies[i] < tau;  // boundary case is uncertain
    if (correctness[i]) {
      certain ? ++out.tc : ++out.fu;
    } else {
      certain ? ++out.fc : ++out.tu;
    }
  }
  return out;
}

UncertaintyScores uncertainty_scores(const UncertaintyConfusion& confusion) {
  const std::size_t n = confusion.total();
  if (n == 0) throw DomainError("uncertainty_scores: no samples");
  UncertaintyScores out;
  out.uacc = static_cast<double>(confusion.tu + confusion.tc) / static_cast<double>(n);
  if (confusion.tc + confusion.fu > 0)
    out.utpr = static_cast<double>(confusion.tc) /
               static_cast<double>(confusion.tc + confusion.fu);
  if (confusion.fc + confusion.tu > 0)
    out.ufpr = static_cast<double>(confusion.fc) /
               static_cast<double>(confusion.fc + confusion.tu);
  if (out.utpr && out.ufpr) out.ug_mean = std::sqrt(*out.utpr * (1.0 - *out.ufpr));
  return out;
}

std::vector<SweepRow> threshold_sweep(const std::vector<bool>& correctness,
                                      const std::vector<double>& entropies,
                                      std::span<const double> taus) {
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (taus[i - 1] > taus[i])
      throw DomainError("threshold_sweep: taus must be sorted ascending");
  std::vector<SweepRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    SweepRow row;
    row.confusion = uncertainty_confusion(correctness, entropies, tau);
    row.scores = uncertainty_scores(row.confusion);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ucalib
