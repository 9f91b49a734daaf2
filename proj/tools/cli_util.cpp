#include "cli_util.hpp"

#include <fstream>

#include "ucalib/csv.hpp"
#include "ucalib/data_model.hpp"
#include "ucalib/digest.hpp"
#include "ucalib/errors.hpp"
#include "ucalib/version.hpp"

namespace ucalib::cli {

SplitInputs load_split(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ParseError("split directory not found: " + dir.string());
  auto stack = read_stack(dir);
  auto features = read_feature_matrix(dir / "features.csv");
  auto labels = read_labels(dir / "labels.csv", stack.classes());
  if (features.samples() != stack.samples() || labels.size() != stack.samples())
    throw ValidationError(dir.string() + ": features, labels and stack disagree on the "
                          "sample count");
  auto mean = mean_over_passes(stack);
  return SplitInputs{std::move(features), std::move(labels), std::move(stack),
                     std::move(mean)};
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string cell =
        pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start);
    out.push_back(parse_double(cell, flag));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.empty()) throw DomainError(flag + ": empty list");
  return out;
}

RunRecorder::RunRecorder(std::string command, std::filesystem::path out_dir)
    : command_(std::move(command)),
      out_dir_(std::move(out_dir)),
      start_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(out_dir_);
}

void RunRecorder::add_artifact(const std::filesystem::path& path) {
  artifacts_[std::filesystem::relative(path, out_dir_).string()] = fnv1a64_file(path);
}

void RunRecorder::add_warning(std::string message) {
  warnings_.push_back(std::move(message));
}

void RunRecorder::finish(const json& config_echo) {
  const auto elapsed = std::chrono::steady_clock::now() - start_;
  json manifest;
  manifest["format"] = "ucalib-run";
  manifest["version"] = std::string(kVersion);
  manifest["command"] = command_;
  manifest["config"] = config_echo;
  manifest["warnings"] = warnings_;
  manifest["artifacts"] = artifacts_;
  manifest["wall_time_ms"] =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed)
          .count();
  write_text(out_dir_ / "run_manifest.json", manifest.dump(2) + "\n");
}

json pct_or_null(const std::optional<double>& fraction) {
  if (!fraction) return nullptr;
  return pct(*fraction);
}

std::string pct_or_nan(const std::optional<double>& fraction) {
  if (!fraction) return "nan";
  return format_double(pct(*fraction));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ParseError("failed writing " + path.string());
}

json load_json_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace ucalib::cli
