#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucalib/types.hpp"

namespace ucalib::cli {

using nlohmann::json;

// One split directory of a bundle: features.csv, labels.csv, probs_t*.csv.
struct SplitInputs {
  FeatureMatrix features;
  LabelVector labels;
  PredictionStack stack;
  ProbMatrix mean;
};

SplitInputs load_split(const std::filesystem::path& dir);

// Comma-separated doubles ("0.2,0.3,0.5"); must be non-empty.
std::vector<double> parse_double_list(const std::string& text, const std::string& flag);

// Tracks artifacts written by a subcommand and finalizes run_manifest.json.
class RunRecorder {
 public:
  RunRecorder(std::string command, std::filesystem::path out_dir);

  void add_artifact(const std::filesystem::path& path);
  void add_warning(std::string message);
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Writes <out>/run_manifest.json with the config echo, tool version,
  // warnings, artifact digests and wall time.
  void finish(const json& config_echo);

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  std::vector<std::string> warnings_;
  std::map<std::string, std::string> artifacts_;
  std::chrono::steady_clock::time_point start_;
};

// Percent scaling used by every CLI report; the library itself returns
// fractions.
inline double pct(double fraction) { return 100.0 * fraction; }

// JSON value for possibly-undefined rates: null when undefined.
json pct_or_null(const std::optional<double>& fraction);

// CSV cell for possibly-undefined rates: "nan" when undefined.
std::string pct_or_nan(const std::optional<double>& fraction);

void write_text(const std::filesystem::path& path, const std::string& text);

json load_json_config(const std::string& path);

}  // namespace ucalib::cli
