#include "ucalib/dual.hpp"

#include <nlohmann/json.hpp>

#include "ucalib/data_model.hpp"
#include "ucalib/errors.hpp"
#include "ucalib/version.hpp"

namespace ucalib {

using nlohmann::json;

DualCalibrator fit_dual(const ProbMatrix& cal_probs, const LabelVector& cal_labels,
                        const StratificationFlags& cal_flags, double beta,
                        const ConformalConfig& config) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("fit_dual: beta must be in [0, 1]");
  if (cal_flags.flags.size() != cal_probs.samples() ||
      cal_labels.size() != cal_probs.samples())
    throw DomainError("fit_dual: flags, labels and probabilities must cover the same "
                      "samples");

  std::vector<std::size_t> correct_idx;
  std::vector<std::size_t> incorrect_idx;
  for (std::size_t i = 0; i < cal_flags.flags.size(); ++i)
    (cal_flags.flags[i] ? correct_idx : incorrect_idx).push_back(i);

  if (correct_idx.empty())
    throw ConfigError("fit_dual: no calibration sample was flagged putatively correct; "
                      "dual calibration is not possible with this stratification");

  MulticlassCalibrator standard =
      fit_standard(gather_rows(cal_probs, correct_idx), gather_rows(cal_labels, correct_idx));

  std::vector<std::string> warnings;
  MulticlassCalibrator underconfident = [&] {
    // Groups below the two-sample fitting minimum take the same fallback as
    // an empty group: the beta-mixture fit on the full calibration set.
    if (incorrect_idx.size() < 2) {
      warnings.push_back(
          incorrect_idx.empty()
              ? "putatively-incorrect calibration group is empty; underconfident "
                "calibrator fitted on the full calibration set"
              : "putatively-incorrect calibration group has fewer than 2 samples; "
                "underconfident calibrator fitted on the full calibration set");
      return fit_underconfident(cal_probs, beta);
    }
    return fit_underconfident(gather_rows(cal_probs, incorrect_idx), beta);
  }();

  return DualCalibrator(std::move(standard), std::move(underconfident), config, beta,
                        std::move(warnings));
}

ProbMatrix DualCalibrator::apply(const ProbMatrix& probs,
                                 const StratificationFlags& flags) const {
  if (probs.classes() != classes())
    throw DomainError("DualCalibrator::apply: class count mismatch");
  if (flags.flags.size() != probs.samples())
    throw DomainError("DualCalibrator::apply: flag count does not match row count");
  Matrix out(probs.samples(), probs.classes());
  for (std::size_t i = 0; i < probs.samples(); ++i) {
    const MulticlassCalibrator& cal = flags.flags[i] ? standard_ : underconfident_;
    for (std::size_t c = 0; c < probs.classes(); ++c)
      out(i, c) = cal.model(c).predict(probs.at(i, c));
  }
  return renormalize(out);
}

PipelineOutput DualCalibrator::infer(const NeighborIndex& index,
                                     const FeatureMatrix& test_features,
                                     const PredictionStack& test_stack) const {
  if (test_features.samples() != test_stack.samples())
    throw DomainError("DualCalibrator::infer: features and stack cover different "
                      "sample counts");
  const ProbMatrix mean = mean_over_passes(test_stack);
  LabelVector predicted = argmax_labels(mean);
  StratificationFlags flags = stratify(index, test_features, mean, predicted, config_);
  ProbMatrix calibrated = apply(mean, flags);
  std::vector<double> entropies = normalized_entropies(calibrated);
  return PipelineOutput{std::move(calibrated), std::move(entropies), std::move(flags),
                        std::move(predicted)};
}

std::string DualCalibrator::to_json_string() const {
  json j;
  j["format"] = "ucalib-dual-calibrator";
  j["version"] = kCalibratorFormatVersion;
  j["beta"] = beta_;
  j["conformal"] = {{"k", config_.k}, {"alpha", config_.alpha}};
  j["standard"] = json::parse(standard_.to_json_string());
  j["underconfident"] = json::parse(underconfident_.to_json_string());
  j["warnings"] = warnings_;
  return j.dump(2);
}

DualCalibrator DualCalibrator::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("dual calibrator JSON: ") + e.what());
  }
  try {
    MulticlassCalibrator standard =
        MulticlassCalibrator::from_json_string(j.at("standard").dump());
    MulticlassCalibrator underconfident =
        MulticlassCalibrator::from_json_string(j.at("underconfident").dump());
    ConformalConfig config;
    config.k = j.at("conformal").at("k").get<std::size_t>();
    config.alpha = j.at("conformal").at("alpha").get<double>();
    const double beta = j.at("beta").get<double>();
    if (standard.classes() != underconfident.classes())
      throw ValidationError("dual calibrator JSON: class counts differ");
    if (underconfident.beta() != beta)
      throw ValidationError("dual calibrator JSON: beta does not match the "
                            "underconfident calibrator");
    std::vector<std::string> warnings;
    if (j.contains("warnings")) warnings = j.at("warnings").get<std::vector<std::string>>();
    return DualCalibrator(std::move(standard), std::move(underconfident), config, beta,
                          std::move(warnings));
  } catch (const json::exception& e) {
    throw ParseError(std::string("dual calibrator JSON: ") + e.what());
  }
}

}  // namespace ucalib
