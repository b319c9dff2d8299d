#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace couplekit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_file(const std::string& path);
std::string sha256_string(const std::string& text);

/// Provenance record written alongside every artifact-producing command:
/// the exact invocation, input/output hashes, seeds, the effective config,
/// and wall time per phase.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void set_seed(const std::string& name, std::uint64_t seed);
  void set_config(nlohmann::json config);
  void add_wall_seconds(const std::string& phase, double seconds);

  nlohmann::json to_json() const;
  void write(const std::string& path) const;

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  std::map<std::string, std::uint64_t> seeds_;
  nlohmann::json config_ = nlohmann::json::object();
  std::map<std::string, double> wall_seconds_;
};

}  // namespace couplekit::cli
