#include "couplekit/core/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "couplekit/core/design_space.hpp"
#include "couplekit/core/errors.hpp"

namespace couplekit::core {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

double parse_double(const std::string& field, std::size_t row) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  double value = 0.0;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{}) {
    // Allow nan/inf spellings so non-finite rows can be counted, not fatal.
    std::string lower;
    for (const char* p = begin; p != end; ++p) lower.push_back(static_cast<char>(std::tolower(*p)));
    if (lower == "nan" || lower == "-nan") return std::nan("");
    if (lower == "inf" || lower == "+inf") return HUGE_VAL;
    if (lower == "-inf") return -HUGE_VAL;
    throw IoError("dataset row " + std::to_string(row) + ": cannot parse number '" + field + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

Eigen::Index Dataset::output_index(const std::string& name) const {
  for (std::size_t i = 0; i < output_names.size(); ++i) {
    if (output_names[i] == name) return static_cast<Eigen::Index>(i);
  }
  throw ArgumentError("unknown output channel '" + name + "'");
}

std::pair<Dataset, std::vector<Standardization>> standardize_outputs(const Dataset& ds) {
  const Eigen::Index n = ds.outputs.rows();
  if (n < 2) throw ArgumentError("standardize_outputs requires at least two rows");
  Dataset out = ds;
  std::vector<Standardization> stats;
  stats.reserve(static_cast<std::size_t>(ds.outputs.cols()));
  for (Eigen::Index c = 0; c < ds.outputs.cols(); ++c) {
    const Eigen::VectorXd col = ds.outputs.col(c);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n - 1);
    const double stddev = std::sqrt(var);
    if (!(stddev > 1e-12)) {
      throw DegenerateChannelError("output channel '" + ds.output_names.at(c) +
                                   "' is constant (stddev <= 1e-12)");
    }
    out.outputs.col(c) = (col.array() - mean) / stddev;
    stats.push_back(Standardization{mean, stddev});
  }
  return {std::move(out), std::move(stats)};
}

Dataset read_dataset_csv(const std::string& path, const DesignSpace& space,
                         CsvLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset file '" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);

  const auto n_inputs = static_cast<std::size_t>(space.size());
  if (header.size() <= n_inputs) {
    throw IoError("dataset '" + path + "' must have input columns followed by at least one output column");
  }
  for (std::size_t i = 0; i < n_inputs; ++i) {
    if (header[i] != space.variable(static_cast<Eigen::Index>(i)).name) {
      throw IoError("dataset column " + std::to_string(i + 1) + " is '" + header[i] +
                    "' but design space expects '" +
                    space.variable(static_cast<Eigen::Index>(i)).name + "'");
    }
  }

  Dataset ds;
  ds.input_names.assign(header.begin(), header.begin() + static_cast<long>(n_inputs));
  ds.output_names.assign(header.begin() + static_cast<long>(n_inputs), header.end());
  const std::size_t n_outputs = ds.output_names.size();

  std::vector<std::vector<double>> rows;
  std::size_t rejected = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != n_inputs + n_outputs) {
      throw IoError("dataset row " + std::to_string(line_no) + ": expected " +
                    std::to_string(n_inputs + n_outputs) + " fields, got " +
                    std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    bool finite = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row[i] = parse_double(fields[i], line_no);
      finite = finite && std::isfinite(row[i]);
    }
    if (!finite) {
      ++rejected;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (report) report->rejected_rows = rejected;
  if (rows.empty()) throw IoError("dataset '" + path + "' contains no usable rows");

  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  ds.inputs.resize(n_rows, static_cast<Eigen::Index>(n_inputs));
  ds.outputs.resize(n_rows, static_cast<Eigen::Index>(n_outputs));
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < n_inputs; ++c) ds.inputs(r, static_cast<Eigen::Index>(c)) = row[c];
    for (std::size_t c = 0; c < n_outputs; ++c) {
      ds.outputs(r, static_cast<Eigen::Index>(c)) = row[n_inputs + c];
    }
  }
  return ds;
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file '" + path + "'");
  std::ostringstream header;
  bool first = true;
  for (const auto& name : ds.input_names) {
    header << (first ? "" : ",") << csv_escape(name);
    first = false;
  }
  for (const auto& name : ds.output_names) {
    header << (first ? "" : ",") << csv_escape(name);
    first = false;
  }
  out << header.str() << "\n";
  for (Eigen::Index r = 0; r < ds.inputs.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.inputs.cols(); ++c) {
      if (c > 0) out << ",";
      out << format_double(ds.inputs(r, c));
    }
    for (Eigen::Index c = 0; c < ds.outputs.cols(); ++c) {
      out << "," << format_double(ds.outputs(r, c));
    }
    out << "\n";
  }
}

}  // namespace couplekit::core
