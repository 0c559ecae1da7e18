#include "usv/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace usv {

uint64_t file_checksum(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for checksum: " + path);
  uint64_t hash = 1469598103934665603ULL;  // FNV offset basis
  char buf[4096];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    const std::streamsize n = f.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;  // FNV prime
    }
    if (!f) break;
  }
  return hash;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream f(tmp);
    if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
    f << content;
    if (!f.good()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void RunManifest::add_artifact(const std::string& relative_path) {
  const std::string full =
      (std::filesystem::path(output_dir) / relative_path).string();
  artifacts[relative_path] = file_checksum(full);
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["arguments"] = arguments;
  j["config"] = config;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  nlohmann::json arts = nlohmann::json::object();
  for (const auto& [rel, sum] : artifacts) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(sum));
    arts[rel] = buf;
  }
  j["artifacts"] = arts;
  write_file_atomic(path, j.dump(2) + "\n");
}

RunManifest RunManifest::read(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  f >> j;
  RunManifest m;
  m.command = j.value("command", "");
  m.arguments = j.value("arguments", std::vector<std::string>{});
  m.config = j.value("config", std::map<std::string, std::string>{});
  m.seed = j.value("seed", uint64_t{0});
  m.output_dir = j.value("output_dir", "");
  if (j.contains("artifacts")) {
    for (const auto& [rel, sum] : j["artifacts"].items()) {
      m.artifacts[rel] =
          std::stoull(sum.get<std::string>(), nullptr, 16);
    }
  }
  return m;
}

}  // namespace usv
