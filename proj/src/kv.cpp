#include "usv/kv.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace usv {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& raw) {
  try {
    size_t pos = 0;
    double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw KvError(key + ": expected a number, got '" + raw + "'");
  }
}

}  // namespace

Kv Kv::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw KvError(path + ": cannot open config file");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Kv Kv::parse_string(const std::string& text, const std::string& origin) {
  Kv out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw KvError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw KvError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    out.kv_[key] = value;
  }
  return out;
}

bool Kv::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string Kv::require(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) {
    throw KvError(key + ": required key missing");
  }
  return it->second;
}

double Kv::get_double(const std::string& key) const { return parse_double(key, require(key)); }

double Kv::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Kv::get_int(const std::string& key) const {
  double v = get_double(key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw KvError(key + ": expected an integer, got '" + require(key) + "'");
  }
  return i;
}

int Kv::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Kv::get_bool(const std::string& key) const {
  std::string raw = require(key);
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw KvError(key + ": expected a boolean, got '" + raw + "'");
}

bool Kv::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::string Kv::get_string(const std::string& key) const { return require(key); }

std::string Kv::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? require(key) : fallback;
}

std::vector<double> Kv::get_list(const std::string& key) const {
  std::string raw = require(key);
  std::vector<double> out;
  std::string item;
  std::istringstream in(raw);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw KvError(key + ": empty element in list '" + raw + "'");
    }
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) {
    throw KvError(key + ": expected a non-empty list");
  }
  return out;
}

std::vector<double> Kv::get_list(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_list(key) : fallback;
}

void Kv::set(const std::string& key, const std::string& value) { kv_[key] = value; }

void Kv::set_double(const std::string& key, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  kv_[key] = buf;
}

void Kv::set_int(const std::string& key, long long value) { kv_[key] = std::to_string(value); }

void Kv::set_bool(const std::string& key, bool value) { kv_[key] = value ? "true" : "false"; }

void Kv::set_list(const std::string& key, const std::vector<double>& values) {
  std::string joined;
  char buf[32];
  for (size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    if (i) joined += ", ";
    joined += buf;
  }
  kv_[key] = joined;
}

std::string Kv::dump() const {
  std::string out;
  for (const auto& [k, v] : kv_) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

void Kv::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw KvError(path + ": cannot write config file");
  }
  out << dump();
}

std::vector<std::string> Kv::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  std::string p = prefix + ".";
  for (const auto& [k, _] : kv_) {
    if (k.rfind(p, 0) == 0) out.push_back(k);
  }
  return out;
}

}  // namespace usv
