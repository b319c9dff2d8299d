// couplekit: surrogate-based design coupling analysis pipeline.
//
// Subcommands wire the library end to end with stable file contracts:
//   sample        LHS input samples for a design space
//   synth-fowt    synthetic floating-platform demo space + dataset
//   train         FITC surrogate per output channel
//   dca           design coupling + objective sensitivity matrices
//   plan          sequential decomposition plan from a report
//   subset        influential-variable subset from a report
//   run-sequence  staged optimization following a plan
//   optimize      direct (multistart) optimization
//   compare       strategy comparison table
//
// Every artifact-producing command writes a manifest with input/output
// hashes; all randomness comes from explicit --seed flags.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "couplekit/bench/synthetic_fowt.hpp"
#include "couplekit/cli/manifest.hpp"
#include "couplekit/core/dataset.hpp"
#include "couplekit/core/design_space.hpp"
#include "couplekit/core/errors.hpp"
#include "couplekit/core/parallel.hpp"
#include "couplekit/core/rng.hpp"
#include "couplekit/core/sampling.hpp"
#include "couplekit/dca/heatmap.hpp"
#include "couplekit/dca/report_io.hpp"
#include "couplekit/dca/sweep.hpp"
#include "couplekit/opt/problem.hpp"
#include "couplekit/opt/solver.hpp"
#include "couplekit/sgp/model_io.hpp"
#include "couplekit/strategy/compare.hpp"
#include "couplekit/strategy/sequence.hpp"
#include "couplekit/strategy/subset.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace couplekit;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) items.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) items.push_back(current);
  return items;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create output directory '" + path + "'");
}

json result_to_json(const opt::ProblemDefinition& problem, const opt::OptimizationResult& r) {
  json x = json::object();
  const auto names = problem.design_space().variable_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    x[names[i]] = r.x_model[static_cast<Eigen::Index>(i)];
  }
  json violations = json::object();
  for (std::size_t c = 0; c < problem.constraints.size(); ++c) {
    violations[problem.constraints[c].channel] = r.violations.at(c);
  }
  return json{{"x", std::move(x)},
              {"objective", r.objective_model},
              {"objective_standardized", r.objective_std},
              {"status", opt::to_string(r.status)},
              {"feasible", r.feasible},
              {"max_violation", r.max_violation},
              {"violations", std::move(violations)},
              {"iterations", r.iterations}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

// Dense exact-GP prediction used by the train self-check when Z = X.
std::pair<double, double> dense_gp_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                           const sgp::KernelParams& kernel, double prior_mean,
                                           const Eigen::VectorXd& x_star) {
  Eigen::MatrixXd k_xx = sgp::kernel_matrix(kernel, x, x);
  k_xx.diagonal().array() += std::max(kernel.noise_variance(), 1e-10);
  const Eigen::LLT<Eigen::MatrixXd> llt(k_xx);
  Eigen::MatrixXd xs(1, x.cols());
  xs.row(0) = x_star.transpose();
  const Eigen::VectorXd k_star = sgp::kernel_matrix(kernel, x, xs).col(0);
  const Eigen::VectorXd residual = (y.array() - prior_mean).matrix();
  const double mean = prior_mean + k_star.dot(llt.solve(residual));
  const double var = kernel.signal_variance() - k_star.dot(llt.solve(k_star));
  return {mean, var};
}

struct SampleArgs {
  std::string space_path;
  long n = 750;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const core::DesignSpace space = core::load_design_space(args.space_path);
  const Eigen::MatrixXd samples = core::latin_hypercube(space, args.n, args.seed);

  std::ofstream out(args.out);
  if (!out) throw IoError("cannot write '" + args.out + "'");
  const auto names = space.variable_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\n";
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      out << (c ? "," : "") << core::format_double(samples(r, c));
    }
    out << "\n";
  }
  out.close();

  cli::RunManifest manifest("sample", argv);
  manifest.add_input(args.space_path);
  manifest.add_output(args.out);
  manifest.set_seed("sample", args.seed);
  manifest.set_config({{"n", args.n}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write(args.out + ".manifest.json");
  std::cout << "wrote " << samples.rows() << " samples to " << args.out << "\n";
  return 0;
}

struct SynthArgs {
  long n = 750;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  ensure_directory(args.out);
  const auto space = bench::platform_space();
  const core::Dataset data = bench::synthetic_fowt(args.n, args.seed);

  const std::string space_path = (fs::path(args.out) / "space.json").string();
  const std::string data_path = (fs::path(args.out) / "data.csv").string();
  core::save_design_space(space_path, *space);
  core::write_dataset_csv(data_path, data);

  cli::RunManifest manifest("synth-fowt", argv);
  manifest.add_output(space_path);
  manifest.add_output(data_path);
  manifest.set_seed("sample", args.seed);
  manifest.set_config({{"n", args.n}, {"synthetic", true}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write((fs::path(args.out) / "manifest.json").string());
  std::cout << "wrote synthetic demo space and " << data.rows() << "-row dataset to " << args.out
            << " (synthetic response, no physics)\n";
  return 0;
}

struct TrainArgs {
  std::string space_path;
  std::string data_path;
  std::string channels;
  long m = 0;  // 0 = default rule
  std::uint64_t seed = 0;
  std::string out;
};

int run_train(const TrainArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const core::DesignSpace space = core::load_design_space(args.space_path);
  core::CsvLoadReport load_report;
  const core::Dataset data = core::read_dataset_csv(args.data_path, space, &load_report);

  std::vector<std::string> channels = split_list(args.channels);
  if (channels.empty()) {
    channels = data.output_names;  // train everything by default
  }
  for (const auto& channel : channels) data.output_index(channel);  // validates names

  ensure_directory(args.out);
  cli::RunManifest manifest("train", argv);
  manifest.add_input(args.space_path);
  manifest.add_input(args.data_path);
  manifest.set_seed("train", args.seed);

  const Eigen::Index n = data.rows();
  const Eigen::Index m =
      args.m > 0 ? static_cast<Eigen::Index>(args.m) : sgp::FitcModel::default_inducing_count(n);

  json report = json::object();
  report["n_samples"] = n;
  report["rejected_rows"] = load_report.rejected_rows;
  report["inducing_count"] = m;
  json per_channel = json::object();

  std::vector<sgp::TrainedChannel> trained(channels.size());
  core::parallel_for(channels.size(), [&](std::size_t k) {
    trained[k] = sgp::train_channel(space, data, channels[k],
                                    std::min<Eigen::Index>(m, n),
                                    core::derive_seed(args.seed, core::fnv1a64(channels[k])));
  });

  for (std::size_t k = 0; k < channels.size(); ++k) {
    const auto phase_t0 = std::chrono::steady_clock::now();
    const sgp::TrainedChannel& channel = trained[k];
    const auto& summary = channel.model.summary();

    json entry{{"n", summary.n},
               {"m", summary.m},
               {"seed", summary.seed},
               {"log_marginal_likelihood", summary.log_marginal_likelihood},
               {"iterations", summary.iterations},
               {"likelihood_evaluations", summary.evaluations},
               {"added_jitter", summary.added_jitter},
               {"standardization",
                {{"mean", channel.standardization.mean},
                 {"stddev", channel.standardization.stddev}}}};

    // With m == n the inducing set is the training set and the model must
    // agree with a dense exact GP; record the self-check outcome.
    if (summary.m == summary.n && summary.n <= 200) {
      Eigen::MatrixXd u(n, space.size());
      for (Eigen::Index r = 0; r < n; ++r) {
        u.row(r) = space.normalize(data.inputs.row(r).transpose()).transpose();
      }
      const Eigen::Index col = data.output_index(channel.name);
      const Eigen::VectorXd y_std =
          (data.outputs.col(col).array() - channel.standardization.mean) /
          channel.standardization.stddev;
      // Tolerance scales with the signal variance: solve roundoff is
      // relative to terms of that size, and fitted noiseless models can
      // legitimately run to large sigma_f^2.
      const double tol = 1e-6 * std::max(1.0, channel.model.kernel().signal_variance());
      bool pass = true;
      for (Eigen::Index t = 0; t < std::min<Eigen::Index>(n, 16); ++t) {
        const Eigen::VectorXd x_star = u.row((t * 7) % n).transpose();
        const auto p = channel.model.predict(x_star);
        const auto [mean_d, var_d] = dense_gp_predict(u, y_std, channel.model.kernel(),
                                                      channel.model.prior_mean(), x_star);
        pass = pass && std::abs(p.mean - mean_d) <= tol && std::abs(p.variance - var_d) <= tol;
      }
      entry["exact_gp_equivalence"] = pass ? "pass" : "fail";
    } else {
      entry["exact_gp_equivalence"] = "not_applicable";
    }

    const std::string model_path =
        (fs::path(args.out) / ("model_" + channel.name + ".json")).string();
    sgp::save_channel(model_path, channel, space);
    manifest.add_output(model_path);
    manifest.add_wall_seconds("train:" + channel.name, seconds_since(phase_t0));
    per_channel[channel.name] = std::move(entry);
    std::cout << "trained " << channel.name << ": n=" << summary.n << " m=" << summary.m
              << " lml=" << summary.log_marginal_likelihood << "\n";
  }
  report["channels"] = std::move(per_channel);

  const std::string report_path = (fs::path(args.out) / "training_report.json").string();
  write_json(report_path, report);
  manifest.add_output(report_path);
  manifest.set_config({{"channels", channels}, {"m", m}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write((fs::path(args.out) / "manifest.json").string());
  return 0;
}

struct DcaArgs {
  std::string problem_path;
  int ns = 11;
  std::string norm = "rms";
  std::string scheme = "central";
  std::string infeasible = "exclude";
  int starts = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int run_dca(const DcaArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const opt::ProblemDefinition problem = opt::load_problem(args.problem_path);

  dca::SweepConfig config;
  config.n_sweep = args.ns;
  config.norm = dca::norm_from_string(args.norm);
  config.scheme = dca::scheme_from_string(args.scheme);
  config.infeasible = dca::policy_from_string(args.infeasible);
  config.n_starts = args.starts;
  config.seed = args.seed;
  config.validate();

  ensure_directory(args.out);
  const dca::CouplingReport report = dca::coupling_matrices(problem, config);

  const fs::path out(args.out);
  const std::string report_path = (out / "report.json").string();
  const std::string jx_csv = (out / "j_x.csv").string();
  const std::string jpsi_csv = (out / "j_psi.csv").string();
  const std::string jx_svg = (out / "j_x.svg").string();
  const std::string jpsi_svg = (out / "j_psi.svg").string();

  dca::save_report(report_path, report);
  dca::write_matrix_csv(jx_csv, report.j_x, report.mask, report.variable_names);
  dca::write_matrix_csv(jpsi_csv, report.j_psi, report.mask, report.variable_names);
  dca::write_heatmap_svg(jx_svg, report.j_x, report.mask, report.variable_names,
                         "Design coupling matrix J_x");
  dca::write_heatmap_svg(jpsi_svg, report.j_psi, report.mask, report.variable_names,
                         "Objective sensitivity matrix J_psi");

  cli::RunManifest manifest("dca", argv);
  manifest.add_input(args.problem_path);
  for (const auto& path : {report_path, jx_csv, jpsi_csv, jx_svg, jpsi_svg}) {
    manifest.add_output(path);
  }
  manifest.set_seed("dca", args.seed);
  manifest.set_config({{"n_sweep", args.ns},
                       {"norm", args.norm},
                       {"scheme", args.scheme},
                       {"infeasible", args.infeasible},
                       {"n_starts", args.starts}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write((out / "manifest.json").string());
  std::cout << "wrote coupling report for " << report.size() << " variables to " << args.out
            << "\n";
  return 0;
}

struct PlanArgs {
  std::string report_path;
  double tau_group = 0.5;
  double tau_influence = 0.25;
  std::string out;
};

int run_plan(const PlanArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const dca::CouplingReport report = dca::load_report(args.report_path);
  const strategy::SequencePlan plan =
      strategy::build_sequence(report, args.tau_group, args.tau_influence);
  strategy::save_plan(args.out, plan);

  cli::RunManifest manifest("plan", argv);
  manifest.add_input(args.report_path);
  manifest.add_output(args.out);
  manifest.set_config({{"tau_group", args.tau_group}, {"tau_influence", args.tau_influence}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write(args.out + ".manifest.json");

  std::cout << "plan:";
  for (const auto& stage : plan.stage_names()) {
    std::cout << " [";
    for (std::size_t i = 0; i < stage.size(); ++i) std::cout << (i ? " " : "") << stage[i];
    std::cout << "]";
  }
  std::cout << "\n";
  return 0;
}

struct SubsetArgs {
  std::string report_path;
  long k = 1;
  std::string mode = "coupling_aware";
  std::string out;
};

int run_subset(const SubsetArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const dca::CouplingReport report = dca::load_report(args.report_path);
  const strategy::SubsetSelection selection =
      strategy::select_subset(report, args.k, strategy::subset_mode_from_string(args.mode));
  strategy::save_subset(args.out, selection);

  cli::RunManifest manifest("subset", argv);
  manifest.add_input(args.report_path);
  manifest.add_output(args.out);
  manifest.set_config({{"k", args.k}, {"mode", args.mode}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write(args.out + ".manifest.json");

  std::cout << "subset:";
  for (const auto& name : selection.chosen_names()) std::cout << " " << name;
  std::cout << "\n";
  return 0;
}

struct RunSequenceArgs {
  std::string problem_path;
  std::string plan_path;
  std::uint64_t seed = 0;
  int starts = 10;
  std::string out = "sequence_result.json";
};

int run_run_sequence(const RunSequenceArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const opt::ProblemDefinition problem = opt::load_problem(args.problem_path);
  strategy::SequencePlan plan = strategy::load_plan(args.plan_path);

  strategy::SequenceRunOptions options;
  options.n_starts = args.starts;
  const strategy::SequenceRunResult run =
      strategy::run_sequence(problem, plan, args.seed, options);

  json stages = json::array();
  for (std::size_t s = 0; s < run.stage_results.size(); ++s) {
    json stage = result_to_json(problem, run.stage_results[s]);
    stage["stage"] = s;
    json free = json::array();
    for (Eigen::Index v : plan.stages[s]) {
      free.push_back(problem.design_space().variable(v).name);
    }
    stage["free"] = std::move(free);
    stages.push_back(std::move(stage));
  }
  json out{{"final", result_to_json(problem, run.final)},
           {"stages", std::move(stages)},
           {"failed_stage", run.failed_stage}};
  write_json(args.out, out);

  cli::RunManifest manifest("run-sequence", argv);
  manifest.add_input(args.problem_path);
  manifest.add_input(args.plan_path);
  manifest.add_output(args.out);
  manifest.set_seed("sequence", args.seed);
  manifest.set_config({{"starts", args.starts}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write(args.out + ".manifest.json");

  if (!run.succeeded()) {
    std::cerr << "error: sequence stage " << run.failed_stage
              << " is infeasible (least-violating point written to " << args.out << ")\n";
    return 1;
  }
  std::cout << "sequence objective " << run.final.objective_model << " ("
            << opt::to_string(run.final.status) << ")\n";
  return 0;
}

struct OptimizeArgs {
  std::string problem_path;
  std::string free_list;
  int starts = 10;
  std::uint64_t seed = 0;
  std::string out = "optimize_result.json";
};

int run_optimize(const OptimizeArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const opt::ProblemDefinition problem = opt::load_problem(args.problem_path);

  opt::OptimizationSpec spec = opt::OptimizationSpec::full(problem);
  if (!args.free_list.empty()) {
    spec.free_variables.clear();
    for (const auto& name : split_list(args.free_list)) {
      spec.free_variables.push_back(problem.design_space().index_of(name));
    }
  }
  const opt::OptimizationResult result =
      opt::minimize_multistart(spec, args.starts, args.seed);
  write_json(args.out, result_to_json(problem, result));

  cli::RunManifest manifest("optimize", argv);
  manifest.add_input(args.problem_path);
  manifest.add_output(args.out);
  manifest.set_seed("optimize", args.seed);
  manifest.set_config({{"free", args.free_list.empty() ? "all" : args.free_list},
                       {"starts", args.starts}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write(args.out + ".manifest.json");

  std::cout << "objective " << result.objective_model << " (" << opt::to_string(result.status)
            << ")\n";
  return 0;
}

struct CompareArgs {
  std::string problem_path;
  std::string plans;
  std::string subsets;
  std::uint64_t random = 0;
  std::uint64_t seed = 0;
  int starts = 10;
  std::string out;
};

int run_compare(const CompareArgs& args, const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const opt::ProblemDefinition problem = opt::load_problem(args.problem_path);

  std::vector<strategy::SequencePlan> plans;
  for (const auto& path : split_list(args.plans)) plans.push_back(strategy::load_plan(path));
  std::vector<strategy::SubsetSelection> subsets;
  for (const auto& path : split_list(args.subsets)) {
    subsets.push_back(strategy::load_subset(path));
  }

  strategy::CompareOptions options;
  options.n_starts = args.starts;
  const strategy::ComparisonTable table =
      strategy::compare_strategies(problem, plans, subsets, args.random, args.seed, options);
  strategy::write_comparison_csv(args.out, table);

  if (table.random_capped) {
    std::cerr << "warning: requested more random sequences than exist; capped to "
              << (table.random_summary ? table.random_summary->count : 0) << "\n";
  }

  cli::RunManifest manifest("compare", argv);
  manifest.add_input(args.problem_path);
  for (const auto& path : split_list(args.plans)) manifest.add_input(path);
  for (const auto& path : split_list(args.subsets)) manifest.add_input(path);
  manifest.add_output(args.out);
  manifest.set_seed("compare", args.seed);
  manifest.set_config(
      {{"random", args.random}, {"starts", args.starts}, {"capped", table.random_capped}});
  manifest.add_wall_seconds("total", seconds_since(t0));
  manifest.write(args.out + ".manifest.json");

  std::cout << "wrote " << table.rows.size() << " comparison rows to " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"couplekit: surrogate-based design coupling analysis"};
  app.require_subcommand(1);
  std::vector<std::string> raw_args(argv, argv + argc);

  SampleArgs sample;
  auto* cmd_sample = app.add_subcommand("sample", "Latin hypercube input samples");
  cmd_sample->add_option("space", sample.space_path, "design space JSON")->required();
  cmd_sample->add_option("--n", sample.n, "sample count (>= 2)");
  cmd_sample->add_option("--seed", sample.seed, "RNG seed");
  cmd_sample->add_option("--out", sample.out, "output CSV path")->required();

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth-fowt", "synthetic platform demo space + dataset");
  cmd_synth->add_option("--n", synth.n, "sample count");
  cmd_synth->add_option("--seed", synth.seed, "RNG seed");
  cmd_synth->add_option("--out", synth.out, "output directory")->required();

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "train FITC surrogates per channel");
  cmd_train->add_option("space", train.space_path, "design space JSON")->required();
  cmd_train->add_option("data", train.data_path, "dataset CSV")->required();
  cmd_train->add_option("--channels", train.channels, "comma-separated channel names");
  cmd_train->add_option("--m", train.m, "inducing point count (0 = default rule)");
  cmd_train->add_option("--seed", train.seed, "RNG seed");
  cmd_train->add_option("--out", train.out, "output model directory")->required();

  DcaArgs dca_args;
  auto* cmd_dca = app.add_subcommand("dca", "compute coupling and sensitivity matrices");
  cmd_dca->add_option("problem", dca_args.problem_path, "problem JSON")->required();
  cmd_dca->add_option("--ns", dca_args.ns, "sweep points per cell (>= 3)");
  cmd_dca->add_option("--norm", dca_args.norm, "aggregate norm: rms|l2|max");
  cmd_dca->add_option("--scheme", dca_args.scheme, "derivative scheme: central|forward");
  cmd_dca->add_option("--infeasible", dca_args.infeasible, "infeasible policy: exclude|fail");
  cmd_dca->add_option("--starts", dca_args.starts, "multistarts per sub-optimization");
  cmd_dca->add_option("--seed", dca_args.seed, "RNG seed");
  cmd_dca->add_option("--out", dca_args.out, "output report directory")->required();

  PlanArgs plan;
  auto* cmd_plan = app.add_subcommand("plan", "sequential decomposition plan from a report");
  cmd_plan->add_option("report", plan.report_path, "coupling report JSON")->required();
  cmd_plan->add_option("--tau-group", plan.tau_group, "relative grouping threshold (0, 1]");
  cmd_plan->add_option("--tau-influence", plan.tau_influence,
                       "relative influence threshold (0, 1]");
  cmd_plan->add_option("--out", plan.out, "output plan JSON")->required();

  SubsetArgs subset;
  auto* cmd_subset = app.add_subcommand("subset", "influential variable subset from a report");
  cmd_subset->add_option("report", subset.report_path, "coupling report JSON")->required();
  cmd_subset->add_option("--k", subset.k, "subset size")->required();
  cmd_subset->add_option("--mode", subset.mode, "sensitivity_only|coupling_aware");
  cmd_subset->add_option("--out", subset.out, "output subset JSON")->required();

  RunSequenceArgs run_seq;
  auto* cmd_run_seq = app.add_subcommand("run-sequence", "staged optimization following a plan");
  cmd_run_seq->add_option("problem", run_seq.problem_path, "problem JSON")->required();
  cmd_run_seq->add_option("plan", run_seq.plan_path, "plan JSON")->required();
  cmd_run_seq->add_option("--seed", run_seq.seed, "RNG seed");
  cmd_run_seq->add_option("--starts", run_seq.starts, "multistarts per stage");
  cmd_run_seq->add_option("--out", run_seq.out, "output result JSON");

  OptimizeArgs optimize;
  auto* cmd_optimize = app.add_subcommand("optimize", "direct multistart optimization");
  cmd_optimize->add_option("problem", optimize.problem_path, "problem JSON")->required();
  cmd_optimize->add_option("--free", optimize.free_list,
                           "comma-separated free variables (default: all)");
  cmd_optimize->add_option("--starts", optimize.starts, "multistart count");
  cmd_optimize->add_option("--seed", optimize.seed, "RNG seed");
  cmd_optimize->add_option("--out", optimize.out, "output result JSON");

  CompareArgs compare;
  auto* cmd_compare = app.add_subcommand("compare", "strategy comparison table");
  cmd_compare->add_option("problem", compare.problem_path, "problem JSON")->required();
  cmd_compare->add_option("--plans", compare.plans, "comma-separated plan JSON paths");
  cmd_compare->add_option("--subsets", compare.subsets, "comma-separated subset JSON paths");
  cmd_compare->add_option("--random", compare.random, "unique random sequences to draw");
  cmd_compare->add_option("--seed", compare.seed, "RNG seed");
  cmd_compare->add_option("--starts", compare.starts, "multistarts per solve");
  cmd_compare->add_option("--out", compare.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd_sample->parsed()) return run_sample(sample, raw_args);
    if (cmd_synth->parsed()) return run_synth(synth, raw_args);
    if (cmd_train->parsed()) return run_train(train, raw_args);
    if (cmd_dca->parsed()) return run_dca(dca_args, raw_args);
    if (cmd_plan->parsed()) return run_plan(plan, raw_args);
    if (cmd_subset->parsed()) return run_subset(subset, raw_args);
    if (cmd_run_seq->parsed()) return run_run_sequence(run_seq, raw_args);
    if (cmd_optimize->parsed()) return run_optimize(optimize, raw_args);
    if (cmd_compare->parsed()) return run_compare(compare, raw_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
