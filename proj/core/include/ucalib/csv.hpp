#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ucalib/types.hpp"

namespace ucalib {

// All floats are written with shortest round-trip decimal formatting, so a
// write/read cycle reproduces the exact same doubles.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& where);

// probs.csv: header c0,...,c{C-1}, one row per sample.
void write_prob_matrix(const std::filesystem::path& path, const ProbMatrix& probs);
ProbMatrix read_prob_matrix(const std::filesystem::path& path);

// features.csv: header f0,...,f{d-1}.
void write_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& features);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);

// labels.csv: header `label`, one integer per row. Values are validated
// against the class count.
void write_labels(const std::filesystem::path& path, const LabelVector& labels);
LabelVector read_labels(const std::filesystem::path& path, std::size_t classes);

// Stacks live as one file per pass: probs_t{t}.csv in a directory, with
// contiguous indices starting at 0.
void write_stack(const std::filesystem::path& dir, const PredictionStack& stack);
PredictionStack read_stack(const std::filesystem::path& dir);

// Single named column of doubles (entropy.csv and friends).
void write_double_column(const std::filesystem::path& path, const std::string& name,
                         const std::vector<double>& values);
std::vector<double> read_double_column(const std::filesystem::path& path,
                                       const std::string& name);

// Generic table of preformatted cells; used by the CLI report writers.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

// Raw cells of a CSV file (header + rows), validated to be rectangular.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_table(const std::filesystem::path& path);

}  // namespace ucalib
