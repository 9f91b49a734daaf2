#include "ucalib/isotonic.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ucalib/data_model.hpp"
#include "ucalib/errors.hpp"
#include "ucalib/version.hpp"

namespace ucalib {
namespace {

using nlohmann::json;

struct Block {
  double value = 0.0;
  double weight = 0.0;
  double min_score = 0.0;
  double max_score = 0.0;
};

json model_to_json(const IsotonicModel& model) {
  return json{{"boundaries", model.boundaries()},
              {"block_values", model.block_values()},
              {"training_range",
               {model.training_range().first, model.training_range().second}}};
}

IsotonicModel model_from_json(const json& j) {
  return IsotonicModel::from_parts(
      j.at("boundaries").get<std::vector<double>>(),
      j.at("block_values").get<std::vector<double>>(),
      {j.at("training_range").at(0).get<double>(),
       j.at("training_range").at(1).get<double>()});
}

}  // namespace

double IsotonicModel::predict(double score) const {
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), score);
  return block_values_[static_cast<std::size_t>(it - boundaries_.begin())];
}

IsotonicModel IsotonicModel::from_parts(std::vector<double> boundaries,
                                        std::vector<double> block_values,
                                        std::pair<double, double> training_range) {
  if (block_values.empty())
    throw ValidationError("IsotonicModel: need at least one block");
  if (block_values.size() != boundaries.size() + 1)
    throw ValidationError("IsotonicModel: block count must equal boundary count + 1");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (!(boundaries[i - 1] < boundaries[i]))
      throw ValidationError("IsotonicModel: boundaries not strictly increasing");
  for (std::size_t i = 1; i < block_values.size(); ++i)
    if (block_values[i - 1] > block_values[i])
      throw ValidationError("IsotonicModel: block values not non-decreasing");
  IsotonicModel model;
  model.boundaries_ = std::move(boundaries);
  model.block_values_ = std::move(block_values);
  model.training_range_ = training_range;
  return model;
}

IsotonicModel pava_fit(std::span<const WeightedPoint> points) {
  if (points.empty()) throw DomainError("pava_fit: empty input");
  std::vector<WeightedPoint> sorted(points.begin(), points.end());
  for (const WeightedPoint& p : sorted) {
    if (!std::isfinite(p.score) || !std::isfinite(p.target))
      throw DomainError("pava_fit: non-finite score or target");
    if (!(p.weight > 0.0) || !std::isfinite(p.weight))
      throw DomainError("pava_fit: weights must be positive");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) { return a.score < b.score; });

  // Merge duplicate scores into one weighted point.
  std::vector<WeightedPoint> merged;
  merged.reserve(sorted.size());
  for (const WeightedPoint& p : sorted) {
    if (!merged.empty() && merged.back().score == p.score) {
      WeightedPoint& m = merged.back();
      const double w = m.weight + p.weight;
      m.target = (m.target * m.weight + p.target * p.weight) / w;
      m.weight = w;
    } else {
      merged.push_back(p);
    }
  }

  // Pool adjacent violators: merge while the previous block exceeds the next.
  std::vector<Block> blocks;
  blocks.reserve(merged.size());
  for (const WeightedPoint& p : merged) {
    blocks.push_back({p.target, p.weight, p.score, p.score});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].value > blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.value = (a.value * a.weight + b.value * b.weight) / w;
      a.weight = w;
      a.max_score = b.max_score;
    }
  }

  // Coalesce adjacent blocks that ended up at the same value; predictions are
  // unchanged and the representation becomes canonical.
  std::vector<Block> canon;
  canon.reserve(blocks.size());
  for (const Block& b : blocks) {
    if (!canon.empty() && canon.back().value == b.value) {
      canon.back().weight += b.weight;
      canon.back().max_score = b.max_score;
    } else {
      canon.push_back(b);
    }
  }

  IsotonicModel model;
  model.block_values_.reserve(canon.size());
  for (const Block& b : canon) model.block_values_.push_back(b.value);
  model.boundaries_.reserve(canon.size() - 1);
  for (std::size_t i = 1; i < canon.size(); ++i)
    model.boundaries_.push_back(0.5 * (canon[i - 1].max_score + canon[i].min_score));
  model.training_range_ = {canon.front().min_score, canon.back().max_score};
  return model;
}

std::vector<double> underconfidence_targets(std::span<const double> probs, double beta,
                                            std::size_t classes) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("underconfidence_targets: beta must be in [0, 1]");
  if (classes < 2) throw DomainError("underconfidence_targets: need at least 2 classes");
  const double uniform = (1.0 - beta) / static_cast<double>(classes);
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = beta * probs[i] + uniform;
  return out;
}

ProbMatrix MulticlassCalibrator::apply(const ProbMatrix& probs) const {
  if (probs.classes() != classes())
    throw DomainError("MulticlassCalibrator::apply: calibrator has " +
                      std::to_string(classes()) + " classes, input has " +
                      std::to_string(probs.classes()));
  Matrix out(probs.samples(), probs.classes());
  for (std::size_t c = 0; c < classes(); ++c) {
    const IsotonicModel& m = models_[c];
    for (std::size_t i = 0; i < probs.samples(); ++i) out(i, c) = m.predict(probs.at(i, c));
  }
  return renormalize(out);
}

MulticlassCalibrator fit_standard(const ProbMatrix& probs, const LabelVector& labels) {
  if (probs.samples() < 2) throw DomainError("fit_standard: need at least 2 samples");
  if (labels.size() != probs.samples())
    throw DomainError("fit_standard: label count does not match sample count");
  if (labels.classes() != probs.classes())
    throw DomainError("fit_standard: class counts differ");
  std::vector<IsotonicModel> models;
  models.reserve(probs.classes());
  std::vector<WeightedPoint> points(probs.samples());
  for (std::size_t c = 0; c < probs.classes(); ++c) {
    for (std::size_t i = 0; i < probs.samples(); ++i) {
      points[i].score = probs.at(i, c);
      points[i].target = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
      points[i].weight = 1.0;
    }
    models.push_back(pava_fit(points));
  }
  return MulticlassCalibrator(CalibratorMode::standard, 1.0, std::move(models));
}

MulticlassCalibrator fit_underconfident(const ProbMatrix& probs, double beta) {
  if (probs.samples() < 2) throw DomainError("fit_underconfident: need at least 2 samples");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("fit_underconfident: beta must be in [0, 1]");
  std::vector<IsotonicModel> models;
  models.reserve(probs.classes());
  std::vector<double> column(probs.samples());
  std::vector<WeightedPoint> points(probs.samples());
  for (std::size_t c = 0; c < probs.classes(); ++c) {
    for (std::size_t i = 0; i < probs.samples(); ++i) column[i] = probs.at(i, c);
    const auto targets = underconfidence_targets(column, beta, probs.classes());
    for (std::size_t i = 0; i < probs.samples(); ++i)
      points[i] = {column[i], targets[i], 1.0};
    models.push_back(pava_fit(points));
  }
  return MulticlassCalibrator(CalibratorMode::underconfident, beta, std::move(models));
}

std::string MulticlassCalibrator::to_json_string() const {
  json j;
  j["format"] = "ucalib-calibrator";
  j["version"] = kCalibratorFormatVersion;
  j["mode"] = mode_ == CalibratorMode::standard ? "standard" : "underconfident";
  j["classes"] = classes();
  if (mode_ == CalibratorMode::underconfident) j["beta"] = beta_;
  json models = json::array();
  for (const IsotonicModel& m : models_) models.push_back(model_to_json(m));
  j["models"] = std::move(models);
  return j.dump(2);
}

MulticlassCalibrator MulticlassCalibrator::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("calibrator JSON: ") + e.what());
  }
  try {
    const std::string mode_name = j.at("mode").get<std::string>();
    CalibratorMode mode;
    double beta = 1.0;
    if (mode_name == "standard") {
      mode = CalibratorMode::standard;
    } else if (mode_name == "underconfident") {
      mode = CalibratorMode::underconfident;
      beta = j.at("beta").get<double>();
      if (!(beta >= 0.0 && beta <= 1.0))
        throw ValidationError("calibrator JSON: beta outside [0, 1]");
    } else {
      throw ValidationError("calibrator JSON: unknown mode '" + mode_name + "'");
    }
    std::vector<IsotonicModel> models;
    for (const json& m : j.at("models")) models.push_back(model_from_json(m));
    if (models.size() != j.at("classes").get<std::size_t>() || models.size() < 2)
      throw ValidationError("calibrator JSON: model count does not match classes");
    return MulticlassCalibrator(mode, beta, std::move(models));
  } catch (const json::exception& e) {
    throw ParseError(std::string("calibrator JSON: ") + e.what());
  }
}

}  // namespace ucalib
