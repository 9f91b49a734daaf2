#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucalib/matrix.hpp"

namespace ucalib::stats {

// One metric value per (run, method); no missing cells.
struct RunMatrix {
  std::vector<std::string> methods;
  Matrix values;  // runs x methods

  static RunMatrix checked(std::vector<std::string> methods, Matrix values);
  std::size_t runs() const noexcept { return values.rows(); }
  std::size_t k() const noexcept { return values.cols(); }
};

struct FriedmanResult {
  double chi2 = 0.0;
  double p_value = 1.0;
  std::vector<double> average_ranks;  // rank 1 = smallest value
};

// Chi-square Friedman statistic with the standard tie correction; rows in
// which every method ties contribute nothing, and a fully tied matrix yields
// statistic 0 with p = 1.
FriedmanResult friedman(const RunMatrix& rm);

struct WilcoxonResult {
  std::optional<double> statistic;  // W = sum of positive-difference ranks
  std::optional<double> p_value;    // undefined when all differences are zero
  std::size_t n_used = 0;           // pairs remaining after dropping zeros
  bool exact = false;               // exact enumeration vs normal approximation
};

// One-sided signed-rank test of median(x - y) < 0. Zero differences are
// dropped; tied magnitudes get average ranks. The null distribution is
// enumerated exactly for n <= 25 (and for untied n <= 30); larger samples
// use the normal approximation with tie-adjusted variance and continuity
// correction.
WilcoxonResult wilcoxon_one_sided(std::span<const double> x, std::span<const double> y);

// Holm step-down adjustment, returned in the input order.
std::vector<double> holm(std::span<const double> pvals);

// Pairwise dominance effect size in [-1, 1].
double cliffs_delta(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

}  // namespace ucalib::stats
