#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace couplekit::core {

class DesignSpace;

/// Sampled model responses: one input row per output row, all in model units.
struct Dataset {
  Eigen::MatrixXd inputs;   // N x N_x
  Eigen::MatrixXd outputs;  // N x N_y
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;

  Eigen::Index rows() const { return inputs.rows(); }
  Eigen::Index output_index(const std::string& name) const;
};

enum class ChannelKind { objective, constraint, auxiliary };

/// z-score transform constants of one output channel, in model units.
struct Standardization {
  double mean = 0.0;
  double stddev = 1.0;

  double to_standard(double model_value) const { return (model_value - mean) / stddev; }
  double to_model(double standard_value) const { return mean + stddev * standard_value; }
};

struct OutputChannel {
  std::string name;
  ChannelKind kind = ChannelKind::auxiliary;
  Standardization standardization;
};

/// z-scores every output column by its training mean/stddev (sample stddev,
/// N-1 denominator). Columns with stddev <= 1e-12 are rejected by name.
std::pair<Dataset, std::vector<Standardization>> standardize_outputs(const Dataset& ds);

struct CsvLoadReport {
  std::size_t rejected_rows = 0;  // rows dropped for non-finite entries
};

/// Reads a dataset CSV (header row: input names then output names). The
/// leading columns must match the design space variable names in order.
/// Rows containing non-finite values are dropped and counted.
Dataset read_dataset_csv(const std::string& path, const DesignSpace& space,
                         CsvLoadReport* report = nullptr);

void write_dataset_csv(const std::string& path, const Dataset& ds);

/// Locale-independent shortest round-trip formatting for doubles.
std::string format_double(double value);

}  // namespace couplekit::core
