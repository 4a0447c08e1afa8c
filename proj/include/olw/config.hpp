#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "olw/errors.hpp"
#include "olw/text_util.hpp"

namespace olw {

// Flat key = value configuration. A [section] header prefixes following keys
// as "section.key". Full-line comments start with '#'. Duplicate keys are
// rejected.
class Config {
 public:
  static Config from_string(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    long long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']' || t.size() < 3) {
          throw config_error(origin + ":" + std::to_string(line_no) +
                             ": malformed section header '" + t + "'");
        }
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty()) {
          throw config_error(origin + ":" + std::to_string(line_no) +
                             ": empty section name");
        }
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw config_error(origin + ":" + std::to_string(line_no) +
                           ": expected key = value, got '" + t + "'");
      }
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) {
        throw config_error(origin + ":" + std::to_string(line_no) + ": empty key");
      }
      if (!section.empty()) key = section + "." + key;
      if (!cfg.values_.emplace(key, value).second) {
        throw config_error(origin + ":" + std::to_string(line_no) +
                           ": duplicate key '" + key + "'");
      }
    }
    return cfg;
  }

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw config_error("missing config key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  long long get_int(const std::string& key) const { return parse_int(key, get_string(key)); }
  long long get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  double get_double(const std::string& key) const { return parse_double(key, get_string(key)); }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  bool get_bool(const std::string& key) const { return parse_bool(key, get_string(key)); }
  bool get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;  // std::map keeps them sorted
  }

  // Rejects any key outside the allowed set (catches typos early).
  void require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [k, v] : values_) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        throw config_error("unknown config key '" + k + "'");
      }
    }
  }

 private:
  static long long parse_int(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0') {
      throw config_error("config key '" + key + "': '" + value + "' is not an integer");
    }
    return v;
  }

  static double parse_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (errno != 0 || end == value.c_str() || *end != '\0') {
      throw config_error("config key '" + key + "': '" + value + "' is not a number");
    }
    return v;
  }

  static bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = to_lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error("config key '" + key + "': '" + value + "' is not a boolean");
  }

  std::map<std::string, std::string> values_;
};

}  // namespace olw
