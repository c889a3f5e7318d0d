#include "dseries/cli/config.hpp"

#include <cstdlib>
#include <fstream>

#include "dseries/errors.hpp"

namespace dseries::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || value[0] == '-') {
    throw InvalidArgument("config key '" + key + "' needs a non-negative integer, got '" + value + "'");
  }
  return v;
}

}  // namespace

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "max_bits") {
      c.max_bits = static_cast<std::int64_t>(parse_unsigned(key, value));
    } else if (key == "max_terms") {
      c.max_terms = parse_unsigned(key, value);
    } else if (key == "workers") {
      c.workers = static_cast<unsigned>(parse_unsigned(key, value));
      if (c.workers == 0) throw InvalidArgument("workers must be at least 1");
    } else {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

Config resolve_config(const std::optional<std::string>& explicit_path) {
  if (explicit_path) return load_config_file(*explicit_path);
  if (const char* env = std::getenv("DSERIES_CONFIG"); env && *env) return load_config_file(env);
  return Config{};
}

}  // namespace dseries::cli
