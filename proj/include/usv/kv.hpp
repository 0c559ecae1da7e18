#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace usv {

/// Error raised by the key-value config layer. The message always starts
/// with the offending key path (or file name for I/O problems).
class KvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shared plain-text configuration format used by vessel, scenario,
/// controller, and mission files.
///
/// Syntax: one `key = value` pair per line, `#` starts a comment,
/// blank lines ignored. Dotted keys act as sections
/// (`mechanism.rod_length = 0.19`). Lists are comma separated.
class Kv {
 public:
  Kv() = default;

  static Kv parse_file(const std::string& path);
  static Kv parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  /// Typed getters. The non-defaulted forms throw KvError naming the key
  /// when it is missing or malformed.
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);
  void set_bool(const std::string& key, bool value);
  void set_list(const std::string& key, const std::vector<double>& values);

  /// Canonical serialization: keys sorted, one pair per line.
  std::string dump() const;
  void write_file(const std::string& path) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

  /// Keys under `prefix.` (prefix given without the trailing dot).
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

 private:
  std::string require(const std::string& key) const;

  std::map<std::string, std::string> kv_;
};

}  // namespace usv
