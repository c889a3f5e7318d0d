#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dseries/dyadic.hpp"
#include "dseries/realsource.hpp"

namespace dseries {

/// One best rational approximation a/q to alpha.
///
/// `index` follows the 1-based numbering of best approximations; `cf_index`
/// is the position in the continued fraction, with 0 the integer part.
struct Convergent {
  std::uint32_t index = 0;
  std::uint32_t cf_index = 0;
  mpz_class a;
  mpz_class q;
  DyadicInterval dist;  // encloses ||q alpha|| = |q alpha - a|
  mpz_class partial_quotient;
  bool integer_part = false;
};

struct QAlphaEntry {
  std::uint32_t index = 0;
  mpz_class q;
  mpz_class q_next;
};

enum class ExpandStatus { Complete, Terminated, PrecisionCap };
std::string to_string(ExpandStatus status);

struct ExpandLimits {
  std::size_t count = 20;
  /// Stop once a convergent with q greater than this has been emitted (0 = no limit).
  mpz_class q_limit = 0;
  std::int64_t initial_bits = 64;
};

struct Expansion {
  std::vector<Convergent> convergents;
  /// Certified partial quotients a_0, a_1, ...
  std::vector<mpz_class> partial_quotients;
  /// Complete: the requested amount was produced. Terminated: alpha is
  /// rational and the expansion ended. PrecisionCap: the cap was reached first
  /// and `convergents` holds what could be certified.
  ExpandStatus status = ExpandStatus::Complete;
  bool exact = false;
  std::int64_t bits_used = 0;
};

/// Best rational approximations of alpha from its continued fraction.
Expansion expand(const RealSource& source, const ExpandLimits& limits);
inline Expansion expand(const RealSource& source, std::size_t count) {
  ExpandLimits limits;
  limits.count = count;
  return expand(source, limits);
}

struct RecordEntry {
  mpz_class q;
  DyadicInterval dist;
};

/// Record minima of ||q alpha|| over 1 <= q <= q_max, found by exhaustive scan.
/// Starts at `bits` of precision and doubles it whenever two candidates cannot
/// be ordered; throws PrecisionCapError when the cap is reached first.
std::vector<RecordEntry> brute_force_best(const RealSource& source, std::uint64_t q_max,
                                          std::int64_t bits = 256);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Entries n with q_n even and q_{n+1} >= 2 q_n, from consecutive convergents.
std::vector<QAlphaEntry> q_alpha(const std::vector<Convergent>& convergents);

/// 1/(2 q_n q_{n+1}) < ||q_n alpha|| / q_n < 1/(q_n q_{n+1}), checked on the enclosure.
bool satisfies_approximation_bounds(const Convergent& current, const mpz_class& q_next);

}  // namespace dseries
