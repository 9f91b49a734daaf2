#include "ucalib/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "ucalib/errors.hpp"

namespace ucalib::stats {
namespace {

// Rank 1 = smallest value; tied values share the average rank.
std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j + 2);  // mean of ranks i+1..j+1
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

// Sum of t^3 - t over tie groups; used by both tie corrections.
double tie_term(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    total += t * t * t - t;
    i = j + 1;
  }
  return total;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Exact null distribution of the positive-rank sum, conditional on the
// observed rank multiset. Ranks are doubled so ties (.5 ranks) stay integral.
double exact_lower_tail(const std::vector<double>& ranks, double w) {
  std::vector<long long> doubled(ranks.size());
  long long total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = std::llround(2.0 * ranks[i]);
    total += doubled[i];
  }
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  long long reach = 0;
  for (long long r : doubled) {
    reach += r;
    for (long long s = reach; s >= r; --s)
      counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
  }
  const long long limit = std::llround(2.0 * w);
  std::uint64_t below = 0;
  for (long long s = 0; s <= std::min(limit, total); ++s)
    below += counts[static_cast<std::size_t>(s)];
  return static_cast<double>(below) / std::ldexp(1.0, static_cast<int>(ranks.size()));
}

}  // namespace

RunMatrix RunMatrix::checked(std::vector<std::string> methods, Matrix values) {
  if (methods.size() != values.cols())
    throw ValidationError("RunMatrix: method names do not match column count");
  if (values.cols() < 2) throw ValidationError("RunMatrix: need at least 2 methods");
  if (values.rows() < 2) throw ValidationError("RunMatrix: need at least 2 runs");
  for (std::size_t r = 0; r < values.rows(); ++r)
    for (double v : values.row(r))
      if (!std::isfinite(v))
        throw ValidationError("RunMatrix: non-finite cell in run " + std::to_string(r));
  RunMatrix rm;
  rm.methods = std::move(methods);
  rm.values = std::move(values);
  return rm;
}

FriedmanResult friedman(const RunMatrix& rm) {
  const std::size_t n = rm.runs();
  const std::size_t k = rm.k();
  std::vector<double> rank_sums(k, 0.0);
  double ties = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = rm.values.row(r);
    const auto ranks = average_ranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    ties += tie_term(row);
  }

  FriedmanResult result;
  result.average_ranks.resize(k);
  for (std::size_t j = 0; j < k; ++j)
    result.average_ranks[j] = rank_sums[j] / static_cast<double>(n);

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double correction = 1.0 - ties / (nd * kd * (kd * kd - 1.0));
  if (correction <= 0.0) {
    // Every run is fully tied; there is no evidence against the null.
    result.chi2 = 0.0;
    result.p_value = 1.0;
    return result;
  }
  double sum_sq = 0.0;
  for (double rj : rank_sums) sum_sq += rj * rj;
  const double plain = (12.0 * sum_sq) / (nd * kd * (kd + 1.0)) - 3.0 * nd * (kd + 1.0);
  result.chi2 = std::max(0.0, plain / correction);
  result.p_value = boost::math::gamma_q((kd - 1.0) / 2.0, result.chi2 / 2.0);
  return result;
}

WilcoxonResult wilcoxon_one_sided(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("wilcoxon_one_sided: length mismatch");
  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult result;
  result.n_used = diffs.size();
  if (diffs.empty()) return result;  // all differences zero: undefined
  if (diffs.size() < 5)
    throw DomainError("wilcoxon_one_sided: need at least 5 non-zero differences, got " +
                      std::to_string(diffs.size()));

  std::vector<double> magnitudes(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) magnitudes[i] = std::abs(diffs[i]);
  const auto ranks = average_ranks(magnitudes);
  double w = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i)
    if (diffs[i] > 0.0) w += ranks[i];
  result.statistic = w;

  const double tie_sum = tie_term(magnitudes);
  const std::size_t n = diffs.size();
  const bool untied = tie_sum == 0.0;
  if (n <= 25 || (untied && n <= 30)) {
    result.exact = true;
    result.p_value = exact_lower_tail(ranks, w);
  } else {
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_sum / 48.0;
    const double z = (w - mean + 0.5) / std::sqrt(variance);
    result.p_value = std::clamp(normal_cdf(z), 0.0, 1.0);
  }
  return result;
}

std::vector<double> holm(std::span<const double> pvals) {
  for (double p : pvals)
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("holm: p-values must be in [0, 1]");
  const std::size_t m = pvals.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  std::vector<double> adjusted(m, 0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double scaled = std::min(1.0, static_cast<double>(m - i) * pvals[order[i]]);
    running = std::max(running, scaled);
    adjusted[order[i]] = running;
  }
  return adjusted;
}

double cliffs_delta(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw DomainError("cliffs_delta: empty input");
  long long net = 0;
  for (double a : x) {
    for (double b : y) {
      if (a > b)
        ++net;
      else if (a < b)
        --net;
    }
  }
  return static_cast<double>(net) /
         (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace ucalib::stats
