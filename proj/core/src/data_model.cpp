#include "ucalib/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ucalib/errors.hpp"
#include "ucalib/rng.hpp"

namespace ucalib {

ProbMatrix mean_over_passes(const PredictionStack& stack) {
  const std::size_t n = stack.samples();
  const std::size_t c = stack.classes();
  const double inv_t = 1.0 / static_cast<double>(stack.passes());
  Matrix mean(n, c);
  for (std::size_t t = 0; t < stack.passes(); ++t) {
    const Matrix& pass = stack.pass(t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c; ++j) mean(i, j) += pass(i, j);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) mean(i, j) *= inv_t;
  return ProbMatrix::checked(std::move(mean));
}

double normalized_entropy(std::span<const double> row) {
  if (row.size() < 2)
    throw DomainError("normalized_entropy: need at least 2 classes");
  double h = 0.0;
  for (double p : row) {
    if (p > 0.0) h -= p * std::log(p);
  }
  const double value = h / std::log(static_cast<double>(row.size()));
  return std::clamp(value, 0.0, 1.0);
}

std::vector<double> normalized_entropies(const ProbMatrix& probs) {
  std::vector<double> out(probs.samples());
  for (std::size_t i = 0; i < probs.samples(); ++i)
    out[i] = normalized_entropy(probs.row(i));
  return out;
}

ProbMatrix renormalize(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(i, c);
      if (v < 0.0)
        throw DomainError("renormalize: negative entry at row " + std::to_string(i) +
                          ", column " + std::to_string(c));
      sum += v;
    }
    if (sum < 1e-12) {
      const double uniform = 1.0 / static_cast<double>(m.cols());
      for (std::size_t c = 0; c < m.cols(); ++c) out(i, c) = uniform;
    } else {
      for (std::size_t c = 0; c < m.cols(); ++c) out(i, c) = m(i, c) / sum;
    }
  }
  return ProbMatrix::checked(std::move(out));
}

std::size_t argmax_row(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

LabelVector argmax_labels(const ProbMatrix& probs) {
  std::vector<int> labels(probs.samples());
  for (std::size_t i = 0; i < probs.samples(); ++i)
    labels[i] = static_cast<int>(argmax_row(probs.row(i)));
  return LabelVector::checked(std::move(labels), probs.classes());
}

SplitIndices make_split(std::size_t n, const SplitSpec& spec) {
  if (n < 4) throw DomainError("make_split: need at least 4 samples");
  const double fractions[4] = {spec.train, spec.conformal, spec.calibration, spec.test};
  double sum = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw ConfigError("make_split: negative fraction");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("make_split: fractions sum to " + std::to_string(sum) +
                      ", expected 1 within 1e-9");

  const auto count = [n](double f) {
    return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_conf = count(spec.conformal);
  const std::size_t n_cal = count(spec.calibration);
  const std::size_t n_test = count(spec.test);
  if (n_conf + n_cal + n_test > n)
    throw ConfigError("make_split: fractions leave no training samples");
  const std::size_t n_train = n - n_conf - n_cal - n_test;  // remainder goes to train
  if (n_train == 0 || n_conf == 0 || n_cal == 0 || n_test == 0)
    throw ConfigError("make_split: every subset must receive at least 1 sample (got " +
                      std::to_string(n_train) + "/" + std::to_string(n_conf) + "/" +
                      std::to_string(n_cal) + "/" + std::to_string(n_test) + ")");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(order[i], order[uniform_below(rng, i + 1)]);

  SplitIndices out;
  auto take = [&order](std::size_t offset, std::size_t count) {
    std::vector<std::size_t> part(order.begin() + offset, order.begin() + offset + count);
    std::sort(part.begin(), part.end());
    return part;
  };
  out.train = take(0, n_train);
  out.conformal = take(n_train, n_conf);
  out.calibration = take(n_train + n_conf, n_cal);
  out.test = take(n_train + n_conf + n_cal, n_test);
  return out;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t c = 0; c < m.cols(); ++c) out(i, c) = m(idx[i], c);
  return out;
}

ProbMatrix gather_rows(const ProbMatrix& m, std::span<const std::size_t> idx) {
  return ProbMatrix::checked(gather_rows(m.values(), idx));
}

FeatureMatrix gather_rows(const FeatureMatrix& m, std::span<const std::size_t> idx) {
  return FeatureMatrix::checked(gather_rows(m.values(), idx));
}

LabelVector gather_rows(const LabelVector& labels, std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
  return LabelVector::checked(std::move(out), labels.classes());
}

PredictionStack gather_rows(const PredictionStack& stack, std::span<const std::size_t> idx) {
  std::vector<Matrix> passes;
  passes.reserve(stack.passes());
  for (std::size_t t = 0; t < stack.passes(); ++t)
    passes.push_back(gather_rows(stack.pass(t), idx));
  return PredictionStack::checked(std::move(passes));
}

}  // namespace ucalib
