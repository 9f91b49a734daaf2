#include "ucalib/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "ucalib/errors.hpp"

namespace ucalib {

NeighborIndex::NeighborIndex(FeatureMatrix features, LabelVector labels,
                             std::vector<double> scores)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      nonconformity_(std::move(scores)) {}

NeighborIndex NeighborIndex::build(FeatureMatrix features, LabelVector labels,
                                   const ProbMatrix& mean_probs) {
  const std::size_t n = features.samples();
  if (labels.size() != n || mean_probs.samples() != n)
    throw DomainError("NeighborIndex::build: features, labels and probabilities must "
                      "cover the same samples (" +
                      std::to_string(n) + ", " + std::to_string(labels.size()) + ", " +
                      std::to_string(mean_probs.samples()) + ")");
  if (labels.classes() != mean_probs.classes())
    throw DomainError("NeighborIndex::build: class counts differ");
  std::vector<double> scores(n);
  for (std::size_t j = 0; j < n; ++j)
    scores[j] = 1.0 - mean_probs.at(j, static_cast<std::size_t>(labels[j]));
  return NeighborIndex(std::move(features), std::move(labels), std::move(scores));
}

std::vector<Neighbor> NeighborIndex::knn(std::span<const double> query,
                                         std::size_t k) const {
  if (k == 0 || k > size())
    throw DomainError("knn: k = " + std::to_string(k) + " outside [1, " +
                      std::to_string(size()) + "]");
  if (query.size() != dim())
    throw DomainError("knn: query dimension " + std::to_string(query.size()) +
                      " does not match index dimension " + std::to_string(dim()));

  std::vector<std::pair<double, std::size_t>> dist2(size());
  for (std::size_t j = 0; j < size(); ++j) {
    const auto point = features_.row(j);
    double d2 = 0.0;
    for (std::size_t c = 0; c < query.size(); ++c) {
      const double diff = query[c] - point[c];
      d2 += diff * diff;
    }
    dist2[j] = {d2, j};
  }
  std::partial_sort(dist2.begin(), dist2.begin() + static_cast<std::ptrdiff_t>(k),
                    dist2.end());
  std::vector<Neighbor> out(k);
  for (std::size_t j = 0; j < k; ++j)
    out[j] = {dist2[j].second, std::sqrt(dist2[j].first)};
  return out;
}

double conformal_quantile(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw DomainError("conformal_quantile: empty scores");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("conformal_quantile: alpha must be in (0, 1)");
  const std::size_t k = scores.size();
  const double raw = std::ceil((1.0 - alpha) * static_cast<double>(k));
  const std::size_t m = std::clamp<std::size_t>(
      raw <= 1.0 ? 1 : static_cast<std::size_t>(raw), 1, k);
  std::vector<double> sorted(scores.begin(), scores.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m - 1),
                   sorted.end());
  return sorted[m - 1];
}

std::vector<std::size_t> prediction_set(std::span<const double> mean_prob_row, double q) {
  std::vector<std::size_t> set;
  for (std::size_t c = 0; c < mean_prob_row.size(); ++c)
    if (1.0 - mean_prob_row[c] <= q) set.push_back(c);
  return set;
}

StratificationFlags stratify(const NeighborIndex& index, const FeatureMatrix& queries,
                             const ProbMatrix& mean_probs, const LabelVector& predicted,
                             const ConformalConfig& config) {
  const std::size_t n = queries.samples();
  if (mean_probs.samples() != n || predicted.size() != n)
    throw DomainError("stratify: inconsistent sample counts");
  if (queries.dim() != index.dim())
    throw DomainError("stratify: feature dimension does not match index");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw DomainError("stratify: alpha must be in (0, 1)");

  StratificationFlags out;
  out.flags.resize(n);
  out.set_sizes.resize(n);
  out.quantiles.resize(n);
  std::vector<double> scores(config.k);
  const auto all_scores = index.nonconformity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto neighbors = index.knn(queries.row(i), config.k);
    for (std::size_t j = 0; j < neighbors.size(); ++j)
      scores[j] = all_scores[neighbors[j].index];
    const double q = conformal_quantile(scores, config.alpha);
    const auto set = prediction_set(mean_probs.row(i), q);
    out.quantiles[i] = q;
    out.set_sizes[i] = set.size();
    out.flags[i] =
        set.size() == 1 && set.front() == static_cast<std::size_t>(predicted[i]);
  }
  return out;
}

StratificationReport stratification_report(const std::vector<bool>& flags,
                                           const std::vector<bool>& correctness) {
  if (flags.size() != correctness.size())
    throw DomainError("stratification_report: length mismatch");
  if (flags.empty()) throw DomainError("stratification_report: zero samples");
  std::size_t n_correct_group = 0, n_correct_group_hits = 0;
  std::size_t n_incorrect_group = 0, n_incorrect_group_hits = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) {
      ++n_correct_group;
      if (correctness[i]) ++n_correct_group_hits;
    } else {
      ++n_incorrect_group;
      if (correctness[i]) ++n_incorrect_group_hits;
    }
  }
  const double n = static_cast<double>(flags.size());
  StratificationReport report;
  report.correct_size_pct = 100.0 * static_cast<double>(n_correct_group) / n;
  report.incorrect_size_pct = 100.0 * static_cast<double>(n_incorrect_group) / n;
  if (n_correct_group > 0)
    report.correct_accuracy_pct =
        100.0 * static_cast<double>(n_correct_group_hits) / static_cast<double>(n_correct_group);
  if (n_incorrect_group > 0)
    report.incorrect_accuracy_pct = 100.0 * static_cast<double>(n_incorrect_group_hits) /
                                    static_cast<double>(n_incorrect_group);
  return report;
}

}  // namespace ucalib
