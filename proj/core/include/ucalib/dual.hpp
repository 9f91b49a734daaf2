#pragma once

#include <string>
#include <vector>

#include "ucalib/conformal.hpp"
#include "ucalib/isotonic.hpp"

namespace ucalib {

struct PipelineOutput {
  ProbMatrix calibrated;
  std::vector<double> entropies;  // normalized entropy of the calibrated rows
  StratificationFlags flags;
  LabelVector predicted_labels;   // pre-calibration argmax, never altered
};

// Pair of one-vs-rest calibrators routed by the stratification flags: the
// standard model handles putatively correct rows, the underconfident model
// everything else. The conformal config used at fit time travels with the
// calibrator so inference cannot stratify with different settings.
class DualCalibrator {
 public:
  const MulticlassCalibrator& standard() const noexcept { return standard_; }
  const MulticlassCalibrator& underconfident() const noexcept { return underconfident_; }
  const ConformalConfig& config() const noexcept { return config_; }
  double beta() const noexcept { return beta_; }
  std::size_t classes() const noexcept { return standard_.classes(); }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Row i goes through the standard calibrator when flags[i] is true and the
  // underconfident one otherwise; rows are renormalized afterwards.
  ProbMatrix apply(const ProbMatrix& probs, const StratificationFlags& flags) const;

  // Mean over passes -> predicted labels -> stratification -> routed
  // calibration -> normalized entropy. Test labels never enter here.
  PipelineOutput infer(const NeighborIndex& index, const FeatureMatrix& test_features,
                       const PredictionStack& test_stack) const;

  std::string to_json_string() const;
  static DualCalibrator from_json_string(const std::string& text);

 private:
  friend DualCalibrator fit_dual(const ProbMatrix&, const LabelVector&,
                                 const StratificationFlags&, double, const ConformalConfig&);
  DualCalibrator(MulticlassCalibrator standard, MulticlassCalibrator underconfident,
                 ConformalConfig config, double beta, std::vector<std::string> warnings)
      : standard_(std::move(standard)),
        underconfident_(std::move(underconfident)),
        config_(config),
        beta_(beta),
        warnings_(std::move(warnings)) {}

  MulticlassCalibrator standard_;
  MulticlassCalibrator underconfident_;
  ConformalConfig config_;
  double beta_ = 1.0;
  std::vector<std::string> warnings_;
};

// Standard calibrator from the putatively correct subset (true-label indicator
// targets), underconfident calibrator from the putatively incorrect subset.
// An empty incorrect group falls back to an underconfident fit on the whole
// set and records a warning; an empty correct group is a configuration error.
DualCalibrator fit_dual(const ProbMatrix& cal_probs, const LabelVector& cal_labels,
                        const StratificationFlags& cal_flags, double beta,
                        const ConformalConfig& config);

}  // namespace ucalib
