#include "dseries/dyadic.hpp"

#include <mpfr.h>

#include <cmath>
#include <memory>

namespace dseries {

namespace {

mpq_class scaled(const mpz_class& m, std::int64_t scale) {
  mpq_class x(m);
  if (scale >= 0) {
    mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), static_cast<mp_bitcnt_t>(scale));
  } else {
    mpq_mul_2exp(x.get_mpq_t(), x.get_mpq_t(), static_cast<mp_bitcnt_t>(-scale));
  }
  return x;
}

}  // namespace

mpq_class DyadicInterval::lower() const { return scaled(lo, scale); }
mpq_class DyadicInterval::upper() const { return scaled(hi, scale); }
mpq_class DyadicInterval::width() const { return scaled(hi - lo, scale); }
mpq_class DyadicInterval::midpoint() const { return scaled(lo + hi, scale + 1); }

bool DyadicInterval::contains(const mpq_class& x) const { return lower() <= x && x <= upper(); }

bool DyadicInterval::contains(const DyadicInterval& inner) const {
  return lower() <= inner.lower() && inner.upper() <= upper();
}

bool DyadicInterval::width_at_most_pow2(std::int64_t bits) const {
  // (hi - lo) 2^-scale <= 2^-bits  <=>  (hi - lo) <= 2^(scale - bits)
  const mpz_class w = hi - lo;
  if (w <= 0) return true;
  const std::int64_t e = scale - bits;
  if (e < 0) return false;
  mpz_class limit;
  mpz_ui_pow_ui(limit.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return w <= limit;
}

std::string DyadicInterval::lower_string(int digits) const {
  return rational_to_string(lower(), digits, false);
}
std::string DyadicInterval::upper_string(int digits) const {
  return rational_to_string(upper(), digits, true);
}
double DyadicInterval::lower_double() const {
  return std::stod(rational_to_string(lower(), 17, false));
}
double DyadicInterval::upper_double() const {
  return std::stod(rational_to_string(upper(), 17, true));
}

mpz_class floor_scaled(const mpq_class& x, std::int64_t scale) {
  mpz_class num = x.get_num();
  mpz_class den = x.get_den();
  if (scale >= 0) {
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(scale));
  } else {
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-scale));
  }
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

mpz_class ceil_scaled(const mpq_class& x, std::int64_t scale) {
  mpz_class num = x.get_num();
  mpz_class den = x.get_den();
  if (scale >= 0) {
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(scale));
  } else {
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-scale));
  }
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

DyadicInterval round_outward(const mpq_class& lo, const mpq_class& hi, std::int64_t scale) {
  return DyadicInterval{floor_scaled(lo, scale), ceil_scaled(hi, scale), scale};
}

std::string rational_to_string(const mpq_class& x, int digits, bool round_up) {
  if (x == 0) return "0";
  mpfr_t f;
  mpfr_init2(f, static_cast<mpfr_prec_t>(digits * 4 + 16));
  mpfr_set_q(f, x.get_mpq_t(), round_up ? MPFR_RNDU : MPFR_RNDD);
  mpfr_exp_t exp10 = 0;
  char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<size_t>(digits), f,
                           round_up ? MPFR_RNDU : MPFR_RNDD);
  std::string mant(raw);
  mpfr_free_str(raw);
  mpfr_clear(f);
  std::string sign;
  if (!mant.empty() && mant[0] == '-') {
    sign = "-";
    mant.erase(0, 1);
  }
  // mant = d1 d2 ... dn meaning 0.d1d2...dn * 10^exp10
  std::string out = sign + mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  out += "e" + std::to_string(static_cast<long long>(exp10) - 1);
  return out;
}

}  // namespace dseries
