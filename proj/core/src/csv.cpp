#include "ucalib/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ucalib/errors.hpp"

namespace ucalib {
namespace {

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  for (const std::string& line : lines) out << line << '\n';
  if (!out) throw ParseError("failed writing " + path.string());
}

// c0,c1,... / f0,f1,... style headers; the width defines the column count.
std::size_t parse_indexed_header(const std::vector<std::string>& fields, char prefix,
                                 const std::filesystem::path& path) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string expected = std::string(1, prefix) + std::to_string(i);
    if (fields[i] != expected)
      throw ParseError(location(path, 1) + ": expected header field '" + expected +
                       "', found '" + fields[i] + "'");
  }
  return fields.size();
}

Matrix read_numeric_body(const std::vector<std::string>& lines, std::size_t cols,
                         const std::filesystem::path& path) {
  if (lines.size() < 2) throw ParseError(path.string() + ": no data rows");
  Matrix m(lines.size() - 1, cols);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != cols)
      throw ParseError(location(path, r + 1) + ": expected " + std::to_string(cols) +
                       " values, found " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < cols; ++c)
      m(r - 1, c) = parse_double(fields[c], location(path, r + 1) + ", column " +
                                                std::to_string(c + 1));
  }
  return m;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ParseError(where + ": non-numeric cell '" + std::string(text) + "'");
  return value;
}

void write_prob_matrix(const std::filesystem::path& path, const ProbMatrix& probs) {
  std::vector<std::string> lines;
  lines.reserve(probs.samples() + 1);
  std::vector<std::string> header(probs.classes());
  for (std::size_t c = 0; c < probs.classes(); ++c) header[c] = "c" + std::to_string(c);
  lines.push_back(join_row(header));
  for (std::size_t i = 0; i < probs.samples(); ++i) {
    std::string line;
    for (std::size_t c = 0; c < probs.classes(); ++c) {
      if (c) line += ',';
      line += format_double(probs.at(i, c));
    }
    lines.push_back(std::move(line));
  }
  write_lines(path, lines);
}

ProbMatrix read_prob_matrix(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path.string() + ": empty file");
  const std::size_t cols = parse_indexed_header(split_fields(lines[0]), 'c', path);
  return ProbMatrix::checked(read_numeric_body(lines, cols, path));
}

void write_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::vector<std::string> lines;
  lines.reserve(features.samples() + 1);
  std::vector<std::string> header(features.dim());
  for (std::size_t c = 0; c < features.dim(); ++c) header[c] = "f" + std::to_string(c);
  lines.push_back(join_row(header));
  for (std::size_t i = 0; i < features.samples(); ++i) {
    std::string line;
    const auto row = features.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += ',';
      line += format_double(row[c]);
    }
    lines.push_back(std::move(line));
  }
  write_lines(path, lines);
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path.string() + ": empty file");
  const std::size_t cols = parse_indexed_header(split_fields(lines[0]), 'f', path);
  return FeatureMatrix::checked(read_numeric_body(lines, cols, path));
}

void write_labels(const std::filesystem::path& path, const LabelVector& labels) {
  std::vector<std::string> lines;
  lines.reserve(labels.size() + 1);
  lines.emplace_back("label");
  for (std::size_t i = 0; i < labels.size(); ++i)
    lines.push_back(std::to_string(labels[i]));
  write_lines(path, lines);
}

LabelVector read_labels(const std::filesystem::path& path, std::size_t classes) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path.string() + ": empty file");
  if (lines[0] != "label")
    throw ParseError(location(path, 1) + ": expected header 'label', found '" +
                     lines[0] + "'");
  std::vector<int> labels;
  labels.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    int value = 0;
    const char* first = lines[r].data();
    const char* last = first + lines[r].size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
      throw ParseError(location(path, r + 1) + ": non-integer label '" + lines[r] + "'");
    labels.push_back(value);
  }
  return LabelVector::checked(std::move(labels), classes);
}

void write_stack(const std::filesystem::path& dir, const PredictionStack& stack) {
  for (std::size_t t = 0; t < stack.passes(); ++t) {
    Matrix copy = stack.pass(t);
    write_prob_matrix(dir / ("probs_t" + std::to_string(t) + ".csv"),
                      ProbMatrix::checked(std::move(copy)));
  }
}

PredictionStack read_stack(const std::filesystem::path& dir) {
  std::vector<Matrix> passes;
  for (std::size_t t = 0;; ++t) {
    const auto path = dir / ("probs_t" + std::to_string(t) + ".csv");
    if (!std::filesystem::exists(path)) break;
    passes.push_back(read_prob_matrix(path).values());
  }
  if (passes.empty())
    throw ParseError(dir.string() + ": no probs_t0.csv found");
  return PredictionStack::checked(std::move(passes));
}

void write_double_column(const std::filesystem::path& path, const std::string& name,
                         const std::vector<double>& values) {
  std::vector<std::string> lines;
  lines.reserve(values.size() + 1);
  lines.push_back(name);
  for (double v : values) lines.push_back(format_double(v));
  write_lines(path, lines);
}

std::vector<double> read_double_column(const std::filesystem::path& path,
                                       const std::string& name) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path.string() + ": empty file");
  if (lines[0] != name)
    throw ParseError(location(path, 1) + ": expected header '" + name + "', found '" +
                     lines[0] + "'");
  std::vector<double> values;
  values.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r)
    values.push_back(parse_double(lines[r], location(path, r + 1)));
  return values;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::string> lines;
  lines.reserve(rows.size() + 1);
  lines.push_back(join_row(header));
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw DomainError("write_table: row width " + std::to_string(row.size()) +
                        " does not match header width " + std::to_string(header.size()));
    lines.push_back(join_row(row));
  }
  write_lines(path, lines);
}

CsvTable read_table(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path.string() + ": empty file");
  CsvTable table;
  table.header = split_fields(lines[0]);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = split_fields(lines[r]);
    if (fields.size() != table.header.size())
      throw ParseError(location(path, r + 1) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

}  // namespace ucalib
