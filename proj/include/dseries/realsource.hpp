#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "dseries/dyadic.hpp"

namespace dseries {

enum class SourceKind { Rational, QuadraticSurd, NamedConstant, Liouville, PartialQuotientStream };
enum class Constant { Pi, InvPi, E };
enum class ExponentSchedule { Factorial, Tower100 };

std::string to_string(SourceKind kind);
std::string to_string(Constant c);
std::string to_string(ExponentSchedule s);

struct RationalParams {
  mpz_class a;
  mpz_class q;  // reduced, q >= 1
};

/// (p + r sqrt(d)) / s
struct SurdParams {
  mpz_class p;
  mpz_class r;
  mpz_class d;
  mpz_class s;
};

struct ConstantParams {
  Constant name;
};

/// a/q + sum_{k >= start} d_k 10^{-e_k}, with e_k = k! or the tower 1, 100, 100^100, ...
/// The digit pattern is repeated: d_k = digits[(k - 1) % digits.size()].
struct LiouvilleSpec {
  mpz_class a = 0;
  mpz_class q = 1;
  std::vector<int> digits{1};
  std::uint32_t start = 1;
  ExponentSchedule schedule = ExponentSchedule::Factorial;

  int digit(std::uint32_t k) const { return digits[(k - 1) % digits.size()]; }
};

/// [a0; a1, ..., ak, (b1, ..., bm)] : finite prefix followed by an optional repeating block.
/// An empty period makes the stream finite, i.e. the value is rational.
struct CfStreamParams {
  std::vector<mpz_class> prefix;
  std::vector<mpz_class> period;
};

using SourceParams =
    std::variant<RationalParams, SurdParams, ConstantParams, LiouvilleSpec, CfStreamParams>;

/// Rational enclosure lo <= alpha <= hi. For irrational sources both inequalities are strict.
struct RationalEnclosure {
  mpq_class lo;
  mpq_class hi;
  std::int64_t bits = 0;  // hi - lo <= 2^-bits
};

inline constexpr std::int64_t kDefaultMaxBits = std::int64_t{1} << 20;
inline constexpr std::int64_t kGuardBits = 32;

/// Exact description of a real number alpha with certified approximations on demand.
///
/// Handles are cheap to copy and share one enclosure cache; the cache is
/// internally synchronized so a source may be read from several threads.
class RealSource {
 public:
  SourceKind kind() const;
  const SourceParams& params() const;
  std::int64_t max_bits() const;
  /// Same number with a different precision cap (fresh cache).
  RealSource with_max_bits(std::int64_t max_bits) const;

  /// Dyadic interval of width <= 2^-bits containing alpha. The result depends
  /// only on (source, bits), and results at increasing bits are nested.
  /// Throws PrecisionCapError when bits exceeds max_bits().
  DyadicInterval approximate(std::int64_t bits) const;

  /// Tightest cheap rational enclosure with width <= 2^-bits; irrational
  /// sources never touch the endpoints.
  RationalEnclosure enclose(std::int64_t bits) const;

  /// The exact value for rational kinds (Rational and finite continued-fraction streams).
  std::optional<mpq_class> exact_value() const;
  bool is_rational() const { return exact_value().has_value(); }

  /// True when the source guarantees that all but finitely many partial
  /// quotients equal 1 (a stream whose repeating block is all ones).
  bool eventually_all_ones() const;

  /// Partial quotients are known exactly without numerics (continued-fraction streams).
  bool has_exact_partial_quotients() const;
  /// k-th partial quotient of a stream source; nullopt past the end of a finite stream.
  std::optional<mpz_class> stream_quotient(std::size_t k) const;

  std::string describe() const;

  struct Impl;

 private:
  explicit RealSource(std::shared_ptr<Impl> impl);
  std::shared_ptr<Impl> impl_;

  friend RealSource make_source(SourceParams params, std::int64_t max_bits);
};

RealSource make_rational(const mpz_class& a, const mpz_class& q,
                         std::int64_t max_bits = kDefaultMaxBits);
RealSource make_surd(const mpz_class& p, const mpz_class& r, const mpz_class& d,
                     const mpz_class& s, std::int64_t max_bits = kDefaultMaxBits);
RealSource make_constant(Constant name, std::int64_t max_bits = kDefaultMaxBits);
RealSource make_liouville(const LiouvilleSpec& spec, std::int64_t max_bits = kDefaultMaxBits);
RealSource make_cf_stream(std::vector<mpz_class> prefix, std::vector<mpz_class> period = {},
                          std::int64_t max_bits = kDefaultMaxBits);
RealSource make_source(SourceParams params, std::int64_t max_bits = kDefaultMaxBits);

/// Looks up a constant by name ("pi", "invpi", "e"); throws InvalidArgument otherwise.
Constant constant_from_name(const std::string& name);

// Liouville helpers.

/// Exponent e_k of the k-th term (k >= 1); nullopt when it does not fit in 62 bits.
std::optional<std::uint64_t> liouville_exponent(ExponentSchedule schedule, std::uint32_t k);

/// lambda_N = a/q + sum_{start <= k <= N} d_k 10^{-e_k}.
/// Throws PrecisionCapError if some needed 10^{e_k} would exceed `max_bits` bits.
mpq_class liouville_partial_sum(const LiouvilleSpec& spec, std::uint32_t n,
                                std::int64_t max_bits = kDefaultMaxBits);

/// Upper bound (10/3) 10^{-e_{N+1}} on lambda - lambda_N, as log10 (exact in the exponent).
/// nullopt when e_{N+1} is unrepresentable (the bound is then below any feasible precision).
std::optional<double> liouville_tail_log10(const LiouvilleSpec& spec, std::uint32_t n);

void validate(const LiouvilleSpec& spec);

}  // namespace dseries
