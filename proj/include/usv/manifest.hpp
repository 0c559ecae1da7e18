#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace usv {

/// FNV-1a over the file bytes; throws when the file cannot be read.
uint64_t file_checksum(const std::string& path);

/// Atomic text write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// Record of one command invocation: enough to re-run it and to verify
/// the outputs byte for byte.
struct RunManifest {
  std::string command;                       // subcommand name
  std::vector<std::string> arguments;        // raw argv tail
  std::map<std::string, std::string> config; // effective key-value config
  uint64_t seed = 0;
  std::string output_dir;
  std::map<std::string, uint64_t> artifacts; // relative path -> checksum

  /// Checksums every artifact and writes manifest.json atomically.
  void add_artifact(const std::string& relative_path);
  void write(const std::string& path) const;
  static RunManifest read(const std::string& path);
};

}  // namespace usv
