#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dseries/realsource.hpp"
#include "dseries/sumengine.hpp"

namespace dseries::cli {

struct Config {
  std::int64_t max_bits = kDefaultMaxBits;
  std::uint64_t max_terms = kDefaultMaxTerms;
  unsigned workers = 1;
};

/// Reads key=value lines (keys max_bits, max_terms, workers; '#' starts a comment).
Config load_config_file(const std::string& path);

/// Explicit path if given, else $DSERIES_CONFIG if set, else defaults.
Config resolve_config(const std::optional<std::string>& explicit_path);

}  // namespace dseries::cli
