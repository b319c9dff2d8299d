#include "couplekit/cli/manifest.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "couplekit/core/errors.hpp"

namespace couplekit::cli {

namespace {

std::string digest_to_hex(const unsigned char* digest, unsigned int length) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw Error("cannot initialize SHA-256");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_, data, size) != 1) throw Error("SHA-256 update failed");
  }

  std::string finish() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_DigestFinal_ex(ctx_, digest, &length) != 1) throw Error("SHA-256 final failed");
    return digest_to_hex(digest, length);
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for hashing");
  Sha256 hash;
  char buffer[1 << 15];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    hash.update(buffer, static_cast<std::size_t>(in.gcount()));
  }
  return hash.finish();
}

std::string sha256_string(const std::string& text) {
  Sha256 hash;
  hash.update(text.data(), text.size());
  return hash.finish();
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)) {}

void RunManifest::add_input(const std::string& path) { inputs_[path] = sha256_file(path); }

void RunManifest::add_output(const std::string& path) { outputs_[path] = sha256_file(path); }

void RunManifest::set_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }

void RunManifest::set_config(nlohmann::json config) { config_ = std::move(config); }

void RunManifest::add_wall_seconds(const std::string& phase, double seconds) {
  wall_seconds_[phase] = seconds;
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{
      {"format", "couplekit-manifest"},
      {"version", kToolVersion},
      {"command", command_},
      {"argv", argv_},
      {"inputs", inputs_},
      {"outputs", outputs_},
      {"seeds", seeds_},
      {"config", config_},
      {"wall_seconds", wall_seconds_},
  };
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest '" + path + "'");
  out << to_json().dump(2) << "\n";
}

}  // namespace couplekit::cli
