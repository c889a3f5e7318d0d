#include <cmath>

#include "dseries/errors.hpp"
#include "dseries/realsource.hpp"

namespace dseries {

namespace {
constexpr std::uint64_t kExponentLimit = std::uint64_t{1} << 62;
}

std::optional<std::uint64_t> liouville_exponent(ExponentSchedule schedule, std::uint32_t k) {
  if (k == 0) return std::nullopt;
  if (schedule == ExponentSchedule::Factorial) {
    std::uint64_t e = 1;
    for (std::uint32_t i = 2; i <= k; ++i) {
      if (e > kExponentLimit / i) return std::nullopt;
      e *= i;
    }
    return e;
  }
  // b_1 = 1, b_{k+1} = 100^{b_k} = 10^{2 b_k}
  std::uint64_t b = 1;
  for (std::uint32_t i = 1; i < k; ++i) {
    if (b >= 31) return std::nullopt;  // 10^{62} already overflows
    std::uint64_t next = 1;
    for (std::uint64_t j = 0; j < 2 * b; ++j) next *= 10;
    b = next;
  }
  return b;
}

void validate(const LiouvilleSpec& spec) {
  if (spec.q < 1) throw InvalidArgument("Liouville base denominator must be positive");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), spec.a.get_mpz_t(), spec.q.get_mpz_t());
  if (g != 1) throw InvalidArgument("Liouville base a/q must be in lowest terms");
  if (spec.digits.empty()) throw InvalidArgument("Liouville digit pattern is empty");
  for (int d : spec.digits) {
    if (d != 1 && d != 3) throw InvalidArgument("Liouville digits must be 1 or 3");
  }
  if (spec.start < 1) throw InvalidArgument("Liouville start index must be >= 1");
}

mpq_class liouville_partial_sum(const LiouvilleSpec& spec, std::uint32_t n,
                                std::int64_t max_bits) {
  mpq_class base(spec.a, spec.q);
  base.canonicalize();
  if (n < spec.start) return base;
  auto top = liouville_exponent(spec.schedule, n);
  if (!top) {
    throw PrecisionCapError("exponent of Liouville term " + std::to_string(n) +
                            " is unrepresentable");
  }
  if (static_cast<double>(*top) * std::log2(10.0) > static_cast<double>(max_bits)) {
    throw PrecisionCapError("Liouville partial sum lambda_" + std::to_string(n) + " needs 10^" +
                            std::to_string(*top) + ", beyond the precision cap");
  }
  mpz_class num = 0;
  for (std::uint32_t k = spec.start; k <= n; ++k) {
    const std::uint64_t e = *liouville_exponent(spec.schedule, k);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(*top - e));
    num += spec.digit(k) * scale;
  }
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(*top));
  mpq_class tail(num, den);
  tail.canonicalize();
  return base + tail;
}

std::optional<double> liouville_tail_log10(const LiouvilleSpec& spec, std::uint32_t n) {
  auto e = liouville_exponent(spec.schedule, std::max(n + 1, spec.start));
  if (!e) return std::nullopt;
  return std::log10(10.0 / 3.0) - static_cast<double>(*e);
}

}  // namespace dseries
