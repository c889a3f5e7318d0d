#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace dseries {

/// Closed interval [lo, hi] * 2^-scale with integer endpoints.
struct DyadicInterval {
  mpz_class lo;
  mpz_class hi;
  std::int64_t scale = 0;

  mpq_class lower() const;
  mpq_class upper() const;
  mpq_class width() const;
  mpq_class midpoint() const;

  bool contains(const mpq_class& x) const;
  /// True when `inner` lies entirely inside this interval.
  bool contains(const DyadicInterval& inner) const;
  /// width() <= 2^-bits.
  bool width_at_most_pow2(std::int64_t bits) const;

  /// Decimal renderings rounded outward (lower rounded down, upper rounded up).
  std::string lower_string(int digits = 17) const;
  std::string upper_string(int digits = 17) const;
  double lower_double() const;
  double upper_double() const;
};

/// Outward-rounded enclosure of an exact rational: [floor(x 2^s), ceil(x 2^s)] 2^-s.
DyadicInterval round_outward(const mpq_class& lo, const mpq_class& hi, std::int64_t scale);

/// floor(x * 2^scale) for a rational x.
mpz_class floor_scaled(const mpq_class& x, std::int64_t scale);
mpz_class ceil_scaled(const mpq_class& x, std::int64_t scale);

/// Decimal string of a rational with `digits` significant digits, rounded down or up.
std::string rational_to_string(const mpq_class& x, int digits, bool round_up);

}  // namespace dseries
