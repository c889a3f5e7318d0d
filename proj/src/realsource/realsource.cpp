#include "dseries/realsource.hpp"

#include <mpfr.h>

#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "dseries/errors.hpp"

namespace dseries {

struct RealSource::Impl {
  SourceKind kind;
  SourceParams params;
  std::int64_t max_bits;
  std::optional<mpq_class> exact;

  mutable std::shared_mutex mutex;
  mutable std::optional<RationalEnclosure> cache;  // highest precision computed so far

  RationalEnclosure raw(std::int64_t bits) const;
};

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Rational: return "Rational";
    case SourceKind::QuadraticSurd: return "QuadraticSurd";
    case SourceKind::NamedConstant: return "NamedConstant";
    case SourceKind::Liouville: return "Liouville";
    case SourceKind::PartialQuotientStream: return "PartialQuotientStream";
  }
  return "?";
}

std::string to_string(Constant c) {
  switch (c) {
    case Constant::Pi: return "pi";
    case Constant::InvPi: return "invpi";
    case Constant::E: return "e";
  }
  return "?";
}

std::string to_string(ExponentSchedule s) {
  return s == ExponentSchedule::Factorial ? "factorial" : "tower100";
}

Constant constant_from_name(const std::string& name) {
  if (name == "pi") return Constant::Pi;
  if (name == "invpi") return Constant::InvPi;
  if (name == "e") return Constant::E;
  throw InvalidArgument("unknown constant '" + name + "' (expected pi, invpi or e)");
}

namespace {

mpq_class dyadic(const mpz_class& m, std::int64_t scale) {
  mpq_class x(m);
  mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), static_cast<mp_bitcnt_t>(scale));
  return x;
}

mpz_class pow2(std::int64_t e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return out;
}

mpz_class pow10(std::uint64_t e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return out;
}

RationalEnclosure surd_enclosure(const SurdParams& sp, std::int64_t bits) {
  // t = floor(|r| sqrt(d) 2^bits), exact via integer square root.
  mpz_class radicand = sp.r * sp.r * sp.d;
  mpz_mul_2exp(radicand.get_mpz_t(), radicand.get_mpz_t(), static_cast<mp_bitcnt_t>(2 * bits));
  mpz_class t;
  mpz_sqrt(t.get_mpz_t(), radicand.get_mpz_t());
  mpz_class base = sp.p;
  mpz_mul_2exp(base.get_mpz_t(), base.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  mpz_class nlo, nhi;
  if (sp.r > 0) {
    nlo = base + t;
    nhi = base + t + 1;
  } else {
    nlo = base - t - 1;
    nhi = base - t;
  }
  mpz_class lo, hi;
  if (sp.s > 0) {
    mpz_fdiv_q(lo.get_mpz_t(), nlo.get_mpz_t(), sp.s.get_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), nhi.get_mpz_t(), sp.s.get_mpz_t());
  } else {
    mpz_fdiv_q(lo.get_mpz_t(), nhi.get_mpz_t(), sp.s.get_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), nlo.get_mpz_t(), sp.s.get_mpz_t());
  }
  // |s| >= 1 keeps the width at most 2 units; one more bit covers it.
  return {dyadic(lo, bits), dyadic(hi, bits), bits - 1};
}

RationalEnclosure constant_enclosure(Constant c, std::int64_t bits) {
  const auto prec = static_cast<mpfr_prec_t>(bits + 16);
  mpfr_t down, up;
  mpfr_init2(down, prec);
  mpfr_init2(up, prec);
  switch (c) {
    case Constant::Pi:
      mpfr_const_pi(down, MPFR_RNDD);
      mpfr_const_pi(up, MPFR_RNDU);
      break;
    case Constant::InvPi: {
      mpfr_t pd, pu;
      mpfr_init2(pd, prec);
      mpfr_init2(pu, prec);
      mpfr_const_pi(pd, MPFR_RNDD);
      mpfr_const_pi(pu, MPFR_RNDU);
      mpfr_ui_div(down, 1, pu, MPFR_RNDD);
      mpfr_ui_div(up, 1, pd, MPFR_RNDU);
      mpfr_clear(pd);
      mpfr_clear(pu);
      break;
    }
    case Constant::E: {
      mpfr_t one;
      mpfr_init2(one, prec);
      mpfr_set_ui(one, 1, MPFR_RNDN);
      mpfr_exp(down, one, MPFR_RNDD);
      mpfr_exp(up, one, MPFR_RNDU);
      mpfr_clear(one);
      break;
    }
  }
  mpfr_mul_2si(down, down, static_cast<long>(bits), MPFR_RNDD);
  mpfr_mul_2si(up, up, static_cast<long>(bits), MPFR_RNDU);
  mpz_class lo, hi;
  mpfr_get_z(lo.get_mpz_t(), down, MPFR_RNDD);
  mpfr_get_z(hi.get_mpz_t(), up, MPFR_RNDU);
  mpfr_clear(down);
  mpfr_clear(up);
  return {dyadic(lo, bits), dyadic(hi, bits), bits - 2};
}

RationalEnclosure stream_enclosure(const CfStreamParams& cf, std::int64_t bits) {
  // Consecutive convergents bracket alpha with gap 1/(q_k q_{k+1}).
  const mpz_class target = pow2(bits);
  mpz_class p_prev = 1, q_prev = 0;
  mpz_class p = cf.prefix[0], q = 1;
  for (std::size_t k = 1;; ++k) {
    const mpz_class& a =
        k < cf.prefix.size() ? cf.prefix[k] : cf.period[(k - cf.prefix.size()) % cf.period.size()];
    mpz_class p_next = a * p + p_prev;
    mpz_class q_next = a * q + q_prev;
    if (q * q_next >= target) {
      mpq_class x(p, q), y(p_next, q_next);
      x.canonicalize();
      y.canonicalize();
      if (x > y) std::swap(x, y);
      return {x, y, bits};
    }
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
}

RationalEnclosure liouville_enclosure(const LiouvilleSpec& spec, std::int64_t bits,
                                      std::int64_t max_bits) {
  const auto digits_needed =
      static_cast<std::uint64_t>(std::ceil(static_cast<double>(bits) * std::log10(2.0))) + 1;
  std::uint32_t n = spec.start - 1;
  for (std::uint32_t k = spec.start;; ++k) {
    auto e = liouville_exponent(spec.schedule, k);
    if (!e || *e > digits_needed) break;
    n = k;
  }
  const mpq_class lambda_n = liouville_partial_sum(spec, n, max_bits);
  std::uint64_t tail_exp = digits_needed + 1;
  if (auto next = liouville_exponent(spec.schedule, std::max(n + 1, spec.start)); next) {
    tail_exp = std::min(tail_exp, *next);
  }
  mpq_class tail(mpz_class(10), 3 * pow10(tail_exp));
  tail.canonicalize();
  return {lambda_n, lambda_n + tail, bits};
}

}  // namespace

RationalEnclosure RealSource::Impl::raw(std::int64_t bits) const {
  if (exact) return {*exact, *exact, bits};
  return std::visit(
      [&](const auto& p) -> RationalEnclosure {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SurdParams>) {
          return surd_enclosure(p, bits + 1);
        } else if constexpr (std::is_same_v<T, ConstantParams>) {
          return constant_enclosure(p.name, bits + 2);
        } else if constexpr (std::is_same_v<T, LiouvilleSpec>) {
          return liouville_enclosure(p, bits, max_bits);
        } else if constexpr (std::is_same_v<T, CfStreamParams>) {
          return stream_enclosure(p, bits);
        } else {
          throw Error("rational source without exact value");
        }
      },
      params);
}

RealSource::RealSource(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

SourceKind RealSource::kind() const { return impl_->kind; }
const SourceParams& RealSource::params() const { return impl_->params; }
std::int64_t RealSource::max_bits() const { return impl_->max_bits; }
std::optional<mpq_class> RealSource::exact_value() const { return impl_->exact; }

RealSource RealSource::with_max_bits(std::int64_t max_bits) const {
  return make_source(impl_->params, max_bits);
}

RationalEnclosure RealSource::enclose(std::int64_t bits) const {
  if (bits < 1) throw InvalidArgument("precision must be at least 1 bit");
  if (bits > impl_->max_bits) {
    throw PrecisionCapError("requested " + std::to_string(bits) + " bits exceeds the cap of " +
                            std::to_string(impl_->max_bits));
  }
  RationalEnclosure enc = impl_->raw(bits);
  std::unique_lock lock(impl_->mutex);
  if (!impl_->cache || impl_->cache->bits < enc.bits) impl_->cache = enc;
  return enc;
}

DyadicInterval RealSource::approximate(std::int64_t bits) const {
  if (bits < 1) throw InvalidArgument("precision must be at least 1 bit");
  if (bits > impl_->max_bits) {
    throw PrecisionCapError("requested " + std::to_string(bits) + " bits exceeds the cap of " +
                            std::to_string(impl_->max_bits));
  }
  if (impl_->exact) {
    return DyadicInterval{floor_scaled(*impl_->exact, bits), ceil_scaled(*impl_->exact, bits),
                          bits};
  }
  // The canonical answer is [F, F + 1] 2^-bits with F = floor(alpha 2^bits);
  // F is found from any enclosure that does not straddle a grid point.
  auto resolve = [bits](const RationalEnclosure& enc) -> std::optional<DyadicInterval> {
    mpz_class f1 = floor_scaled(enc.lo, bits);
    mpz_class f2 = floor_scaled(enc.hi, bits);
    if (f1 != f2) return std::nullopt;
    return DyadicInterval{f1, f1 + 1, bits};
  };
  {
    std::shared_lock lock(impl_->mutex);
    if (impl_->cache && impl_->cache->bits >= bits) {
      if (auto hit = resolve(*impl_->cache)) return *hit;
    }
  }
  const std::int64_t limit = 2 * impl_->max_bits + 64;
  for (std::int64_t guard = kGuardBits; bits + guard <= limit; guard *= 2) {
    RationalEnclosure enc = impl_->raw(bits + guard);
    {
      std::unique_lock lock(impl_->mutex);
      if (!impl_->cache || impl_->cache->bits < enc.bits) impl_->cache = enc;
    }
    if (auto hit = resolve(enc)) return *hit;
  }
  throw PrecisionCapError("could not resolve a " + std::to_string(bits) +
                          "-bit enclosure within the precision cap");
}

bool RealSource::eventually_all_ones() const {
  const auto* cf = std::get_if<CfStreamParams>(&impl_->params);
  if (cf == nullptr || cf->period.empty()) return false;
  for (const auto& a : cf->period) {
    if (a != 1) return false;
  }
  return true;
}

bool RealSource::has_exact_partial_quotients() const {
  return std::holds_alternative<CfStreamParams>(impl_->params);
}

std::optional<mpz_class> RealSource::stream_quotient(std::size_t k) const {
  const auto* cf = std::get_if<CfStreamParams>(&impl_->params);
  if (cf == nullptr) return std::nullopt;
  if (k < cf->prefix.size()) return cf->prefix[k];
  if (cf->period.empty()) return std::nullopt;
  return cf->period[(k - cf->prefix.size()) % cf->period.size()];
}

std::string RealSource::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RationalParams>) {
          os << "rational " << p.a << "/" << p.q;
        } else if constexpr (std::is_same_v<T, SurdParams>) {
          os << "quadratic surd (" << p.p << " + " << p.r << "*sqrt(" << p.d << "))/" << p.s;
        } else if constexpr (std::is_same_v<T, ConstantParams>) {
          os << "constant " << to_string(p.name);
        } else if constexpr (std::is_same_v<T, LiouvilleSpec>) {
          os << "Liouville " << p.a << "/" << p.q << " + sum_{k>=" << p.start << "} d_k 10^-e_k ("
             << to_string(p.schedule) << ")";
        } else {
          os << "continued fraction [" << p.prefix[0];
          for (std::size_t i = 1; i < p.prefix.size(); ++i) os << (i == 1 ? ";" : ",") << p.prefix[i];
          if (!p.period.empty()) {
            os << (p.prefix.size() == 1 ? ";" : ",") << "(";
            for (std::size_t i = 0; i < p.period.size(); ++i) os << (i ? "," : "") << p.period[i];
            os << ")";
          }
          os << "]";
        }
      },
      impl_->params);
  return os.str();
}

RealSource make_source(SourceParams params, std::int64_t max_bits) {
  if (max_bits < 64) throw InvalidArgument("precision cap must be at least 64 bits");
  auto impl = std::make_shared<RealSource::Impl>();
  impl->max_bits = max_bits;
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RationalParams>) {
          if (p.q <= 0) throw InvalidArgument("rational denominator must be positive");
          mpq_class v(p.a, p.q);
          v.canonicalize();
          p.a = v.get_num();
          p.q = v.get_den();
          impl->kind = SourceKind::Rational;
          impl->exact = v;
        } else if constexpr (std::is_same_v<T, SurdParams>) {
          if (p.d <= 0) throw InvalidArgument("surd radicand must be positive");
          if (mpz_perfect_square_p(p.d.get_mpz_t()) != 0) {
            throw InvalidArgument("surd radicand " + p.d.get_str() +
                                  " is a perfect square; use a rational source");
          }
          if (p.s == 0) throw InvalidArgument("surd denominator must be nonzero");
          if (p.r == 0) throw InvalidArgument("surd coefficient r must be nonzero");
          impl->kind = SourceKind::QuadraticSurd;
        } else if constexpr (std::is_same_v<T, ConstantParams>) {
          impl->kind = SourceKind::NamedConstant;
        } else if constexpr (std::is_same_v<T, LiouvilleSpec>) {
          validate(p);
          impl->kind = SourceKind::Liouville;
        } else if constexpr (std::is_same_v<T, CfStreamParams>) {
          if (p.prefix.empty()) throw InvalidArgument("continued fraction needs a0");
          for (std::size_t i = 1; i < p.prefix.size(); ++i) {
            if (p.prefix[i] < 1) throw InvalidArgument("partial quotients after a0 must be >= 1");
          }
          for (const auto& a : p.period) {
            if (a < 1) throw InvalidArgument("partial quotients after a0 must be >= 1");
          }
          impl->kind = SourceKind::PartialQuotientStream;
          if (p.period.empty()) {
            mpz_class num = p.prefix.back(), den = 1;
            for (std::size_t i = p.prefix.size() - 1; i-- > 0;) {
              mpz_class next = p.prefix[i] * num + den;
              den = num;
              num = next;
            }
            mpq_class v(num, den);
            v.canonicalize();
            impl->exact = v;
          }
        }
      },
      params);
  impl->params = std::move(params);
  return RealSource(std::move(impl));
}

RealSource make_rational(const mpz_class& a, const mpz_class& q, std::int64_t max_bits) {
  return make_source(RationalParams{a, q}, max_bits);
}

RealSource make_surd(const mpz_class& p, const mpz_class& r, const mpz_class& d,
                     const mpz_class& s, std::int64_t max_bits) {
  return make_source(SurdParams{p, r, d, s}, max_bits);
}

RealSource make_constant(Constant name, std::int64_t max_bits) {
  return make_source(ConstantParams{name}, max_bits);
}

RealSource make_liouville(const LiouvilleSpec& spec, std::int64_t max_bits) {
  return make_source(spec, max_bits);
}

RealSource make_cf_stream(std::vector<mpz_class> prefix, std::vector<mpz_class> period,
                          std::int64_t max_bits) {
  return make_source(CfStreamParams{std::move(prefix), std::move(period)}, max_bits);
}

}  // namespace dseries
