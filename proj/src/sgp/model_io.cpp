#include "couplekit/sgp/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "couplekit/core/errors.hpp"
#include "couplekit/core/json_util.hpp"

namespace couplekit::sgp {

namespace {
constexpr const char* kFormat = "couplekit-sgp-model";
}

TrainedChannel train_channel(const core::DesignSpace& space, const core::Dataset& data,
                             const std::string& channel, Eigen::Index m, std::uint64_t seed,
                             const FitConfig& config) {
  const Eigen::Index col = data.output_index(channel);
  const Eigen::Index n = data.rows();

  Eigen::MatrixXd u(n, space.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    u.row(r) = space.normalize(data.inputs.row(r).transpose()).transpose();
  }

  const Eigen::VectorXd y = data.outputs.col(col);
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(n - 1);
  const double stddev = std::sqrt(var);
  if (!(stddev > 1e-12)) {
    throw DegenerateChannelError("output channel '" + channel + "' is constant (stddev <= 1e-12)");
  }
  const Eigen::VectorXd y_std = (y.array() - mean) / stddev;

  TrainedChannel out;
  out.name = channel;
  out.standardization = core::Standardization{mean, stddev};
  out.model = FitcModel::fit(u, y_std, m, seed, config);
  return out;
}

void save_channel(const std::string& path, const TrainedChannel& channel,
                  const core::DesignSpace& space) {
  const FitcModel& m = channel.model;
  const TrainingSummary& s = m.summary();

  nlohmann::json space_json;
  core::to_json(space_json, space);

  nlohmann::json j{
      {"format", kFormat},
      {"version", 1},
      {"channel", channel.name},
      {"kernel",
       {{"log_signal_variance", m.kernel().log_signal_variance},
        {"log_length_scale", m.kernel().log_length_scale},
        {"log_noise_variance", m.kernel().log_noise_variance}}},
      {"prior_mean", m.prior_mean()},
      {"inducing_points", core::to_json_array(m.inducing_points())},
      {"weights", core::to_json_array(m.weights())},
      {"factors",
       {{"l_uu", core::to_json_array(m.chol_kuu())}, {"l_b", core::to_json_array(m.chol_b())}}},
      {"standardization",
       {{"mean", channel.standardization.mean}, {"stddev", channel.standardization.stddev}}},
      {"training",
       {{"n", s.n},
        {"m", s.m},
        {"seed", s.seed},
        {"log_marginal_likelihood", s.log_marginal_likelihood},
        {"iterations", s.iterations},
        {"evaluations", s.evaluations},
        {"added_jitter", s.added_jitter}}},
      {"space", std::move(space_json)},
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << j.dump(2) << "\n";
}

LoadedChannel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in model file '" + path + "': " + e.what());
  }
  if (j.value("format", "") != kFormat) {
    throw IoError("file '" + path + "' is not a couplekit SGP model artifact");
  }

  KernelParams kernel;
  kernel.log_signal_variance = j.at("kernel").at("log_signal_variance").get<double>();
  kernel.log_length_scale = j.at("kernel").at("log_length_scale").get<double>();
  kernel.log_noise_variance = j.at("kernel").at("log_noise_variance").get<double>();

  TrainingSummary summary;
  const auto& t = j.at("training");
  summary.n = t.at("n").get<Eigen::Index>();
  summary.m = t.at("m").get<Eigen::Index>();
  summary.seed = t.at("seed").get<std::uint64_t>();
  summary.log_marginal_likelihood = t.at("log_marginal_likelihood").get<double>();
  summary.iterations = t.at("iterations").get<int>();
  summary.evaluations = t.value("evaluations", 0);
  summary.added_jitter = t.at("added_jitter").get<double>();

  LoadedChannel loaded{
      TrainedChannel{
          j.at("channel").get<std::string>(),
          core::Standardization{j.at("standardization").at("mean").get<double>(),
                                j.at("standardization").at("stddev").get<double>()},
          FitcModel::from_parts(kernel, core::matrix_from_json(j.at("inducing_points")),
                                core::vector_from_json(j.at("weights")),
                                core::matrix_from_json(j.at("factors").at("l_uu")),
                                core::matrix_from_json(j.at("factors").at("l_b")),
                                j.at("prior_mean").get<double>(), summary),
      },
      core::design_space_from_json(j.at("space")),
  };
  if (loaded.channel.model.inducing_points().cols() != loaded.space.size()) {
    throw IoError("model file '" + path + "': inducing points do not match the space dimension");
  }
  return loaded;
}

}  // namespace couplekit::sgp
