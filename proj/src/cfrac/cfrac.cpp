#include "dseries/cfrac.hpp"

#include <deque>
#include <functional>

#include "dseries/errors.hpp"

namespace dseries {

std::string to_string(ExpandStatus status) {
  switch (status) {
    case ExpandStatus::Complete: return "complete";
    case ExpandStatus::Terminated: return "terminated";
    case ExpandStatus::PrecisionCap: return "precision_cap";
  }
  return "?";
}

namespace {

std::size_t bit_length(const mpz_class& x) {
  return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

/// Partial quotients of the points just to one side of a rational x.
///
/// If x = [a0; ..., an] canonically, points slightly above x expand as
/// [a0; ..., an, big...] when n is even and [a0; ..., an - 1, 1, big...] when
/// n is odd; points slightly below follow the opposite parity. The stream
/// ends where the neighbouring points' next quotient becomes unbounded.
class OneSidedQuotients {
 public:
  OneSidedQuotients(const mpq_class& x, bool from_above)
      : num_(x.get_num()), den_(x.get_den()), from_above_(from_above) {}

  std::optional<mpz_class> next() {
    if (!pending_.empty()) {
      mpz_class a = pending_.front();
      pending_.pop_front();
      return a;
    }
    if (done_) return std::nullopt;
    mpz_class a, r;
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
    if (r == 0) {
      done_ = true;
      const bool canonical = (index_ % 2 == 0) == from_above_;
      if (canonical) return a;
      pending_.push_back(1);
      return a - 1;
    }
    num_ = den_;
    den_ = r;
    ++index_;
    return a;
  }

 private:
  mpz_class num_;
  mpz_class den_;
  bool from_above_;
  bool done_ = false;
  std::size_t index_ = 0;
  std::deque<mpz_class> pending_;
};

/// Quotients shared by every point of the open interval (lo, hi).
std::vector<mpz_class> certified_prefix(const RationalEnclosure& enc) {
  OneSidedQuotients lower(enc.lo, true);
  OneSidedQuotients upper(enc.hi, false);
  std::vector<mpz_class> out;
  for (;;) {
    auto x = lower.next();
    auto y = upper.next();
    if (!x || !y || *x != *y) break;
    out.push_back(std::move(*x));
  }
  return out;
}

std::vector<mpz_class> euclid_quotients(const mpq_class& v) {
  std::vector<mpz_class> out;
  mpz_class num = v.get_num(), den = v.get_den();
  while (den != 0) {
    mpz_class a, r;
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    out.push_back(a);
    num = den;
    den = r;
  }
  return out;
}

struct Raw {
  std::uint32_t cf_index;
  mpz_class p;
  mpz_class q;
  mpz_class a;
};

/// Best approximations from certified quotients. The integer part a0/1 is a
/// best approximation exactly when a1 >= 2; with a1 == 1 the nearest integer
/// is (a0 + 1)/1, which is the cf_index 1 convergent.
/// Returns false when too few quotients are known to decide the first entry.
bool best_approximations(const std::vector<mpz_class>& quotients, bool complete,
                         const ExpandLimits& limits, std::vector<Raw>& out, bool& reached) {
  out.clear();
  reached = false;
  if (quotients.empty()) return false;
  if (quotients.size() == 1 && !complete) return false;
  const bool skip_integer_part = quotients.size() > 1 && quotients[1] == 1;
  mpz_class p_prev2 = 0, q_prev2 = 1, p_prev = 1, q_prev = 0;
  for (std::size_t k = 0; k < quotients.size(); ++k) {
    mpz_class p = quotients[k] * p_prev + p_prev2;
    mpz_class q = quotients[k] * q_prev + q_prev2;
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = p;
    q_prev = q;
    if (k == 0 && skip_integer_part) continue;
    out.push_back(Raw{static_cast<std::uint32_t>(k), p, q, quotients[k]});
    if (out.size() >= limits.count || (limits.q_limit > 0 && q > limits.q_limit)) {
      reached = true;
      break;
    }
  }
  return true;
}

DyadicInterval distance_enclosure(const mpz_class& a, const mpz_class& q, const mpq_class& lo,
                                  const mpq_class& hi, std::int64_t scale) {
  mpq_class x = q * lo - a;
  mpq_class y = q * hi - a;
  if (x > 0) return round_outward(x, y, scale);
  if (y < 0) return round_outward(-y, -x, scale);
  return round_outward(0, std::max(mpq_class(-x), y), scale);
}

bool separated(const std::vector<Convergent>& convs) {
  for (std::size_t i = 0; i < convs.size(); ++i) {
    if (convs[i].dist.lo <= 0 && convs[i].dist.hi > 0) return false;
    if (i > 0 && !(convs[i].dist.upper() < convs[i - 1].dist.lower())) return false;
  }
  return true;
}

void fill_distances(const RealSource& source, std::vector<Convergent>& convs,
                    std::int64_t start_bits) {
  if (convs.empty()) return;
  const std::size_t qbits = bit_length(convs.back().q);
  if (auto v = source.exact_value()) {
    const auto scale = static_cast<std::int64_t>(2 * qbits + 64);
    for (auto& c : convs) c.dist = distance_enclosure(c.a, c.q, *v, *v, scale);
    return;
  }
  std::int64_t bits = std::max<std::int64_t>(start_bits, static_cast<std::int64_t>(2 * qbits + 64));
  bits = std::min(bits, source.max_bits());
  for (;;) {
    RationalEnclosure enc = source.enclose(bits);
    const auto scale = bits + static_cast<std::int64_t>(qbits) + 8;
    for (auto& c : convs) c.dist = distance_enclosure(c.a, c.q, enc.lo, enc.hi, scale);
    if (separated(convs) || bits >= source.max_bits()) return;
    bits = std::min(bits * 2, source.max_bits());
  }
}

Expansion finish(const RealSource& source, const std::vector<mpz_class>& quotients,
                 const std::vector<Raw>& raw, ExpandStatus status, bool exact,
                 std::int64_t bits) {
  Expansion out;
  out.partial_quotients = quotients;
  out.status = status;
  out.exact = exact;
  out.bits_used = bits;
  std::uint32_t n = 1;
  for (const auto& r : raw) {
    Convergent c;
    c.index = n++;
    c.cf_index = r.cf_index;
    c.a = r.p;
    c.q = r.q;
    c.partial_quotient = r.a;
    c.integer_part = r.cf_index == 0;
    out.convergents.push_back(std::move(c));
  }
  fill_distances(source, out.convergents, bits);
  return out;
}

}  // namespace

Expansion expand(const RealSource& source, const ExpandLimits& limits) {
  if (limits.count < 1) throw InvalidArgument("expansion needs count >= 1");
  std::vector<Raw> raw;
  bool reached = false;

  if (auto v = source.exact_value()) {
    auto quotients = euclid_quotients(*v);
    best_approximations(quotients, true, limits, raw, reached);
    const bool ended = !raw.empty() && mpq_class(raw.back().p, raw.back().q) == *v;
    return finish(source, quotients, raw,
                  ended ? ExpandStatus::Terminated : ExpandStatus::Complete, ended, 0);
  }

  if (source.has_exact_partial_quotients()) {
    std::vector<mpz_class> quotients;
    for (std::size_t k = 0;; ++k) {
      quotients.push_back(*source.stream_quotient(k));
      if (k >= 1 && best_approximations(quotients, false, limits, raw, reached) && reached) {
        break;
      }
    }
    return finish(source, quotients, raw, ExpandStatus::Complete, false, 0);
  }

  std::int64_t bits = std::min(std::max<std::int64_t>(limits.initial_bits, 16), source.max_bits());
  std::vector<mpz_class> quotients;
  for (;;) {
    quotients = certified_prefix(source.enclose(bits));
    if (best_approximations(quotients, false, limits, raw, reached) && reached) {
      return finish(source, quotients, raw, ExpandStatus::Complete, false, bits);
    }
    if (bits >= source.max_bits()) {
      return finish(source, quotients, raw, ExpandStatus::PrecisionCap, false, bits);
    }
    bits = std::min(bits * 2, source.max_bits());
  }
}

std::vector<RecordEntry> brute_force_best(const RealSource& source, std::uint64_t q_max,
                                          std::int64_t bits) {
  if (q_max < 1) throw InvalidArgument("q_max must be >= 1");
  if (q_max > kBruteForceLimit) {
    throw InvalidArgument("q_max exceeds the brute-force oracle bound of 10^7");
  }
  std::vector<RecordEntry> records;

  if (auto v = source.exact_value()) {
    const mpz_class num = v->get_num();
    const mpz_class den = v->get_den();
    mpz_class best = -1;
    mpz_class r;
    for (std::uint64_t q = 1; q <= q_max; ++q) {
      mpz_class qa = num * static_cast<unsigned long>(q);
      mpz_fdiv_r(r.get_mpz_t(), qa.get_mpz_t(), den.get_mpz_t());
      mpz_class d = std::min(r, mpz_class(den - r));
      if (best < 0 || d < best) {
        best = d;
        mpq_class dist(d, den);
        dist.canonicalize();
        records.push_back(RecordEntry{mpz_class(static_cast<unsigned long>(q)),
                                      round_outward(dist, dist, 128)});
      }
    }
    return records;
  }

  for (;;) {
    const DyadicInterval enc = source.approximate(bits);
    const mpz_class one = mpz_class(1) << static_cast<mp_bitcnt_t>(bits);
    bool ambiguous = false;
    records.clear();
    mpz_class min_lo, min_hi, x, frac, d;
    for (std::uint64_t q = 1; q <= q_max; ++q) {
      const mpz_class slack(static_cast<unsigned long>(q));
      mpz_mul_ui(x.get_mpz_t(), enc.lo.get_mpz_t(), static_cast<unsigned long>(q));
      mpz_fdiv_r_2exp(frac.get_mpz_t(), x.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
      d = one - frac;
      if (frac < d) d = frac;
      // ||q alpha|| is within q units of ||q lo|| (1-Lipschitz, width one unit).
      mpz_class lo = d - slack;
      if (lo < 0) lo = 0;
      mpz_class hi = d + slack;
      bool record = false;
      if (q == 1) {
        record = true;
      } else if (hi < min_lo) {
        record = true;
      } else if (lo >= min_hi) {
        record = false;
      } else {
        ambiguous = true;
        break;
      }
      if (record) {
        min_lo = lo;
        min_hi = hi;
        records.push_back(RecordEntry{slack, DyadicInterval{lo, hi, bits}});
      }
    }
    if (!ambiguous) return records;
    if (bits * 2 > source.max_bits()) {
      throw PrecisionCapError("brute-force scan could not order two candidates within the cap");
    }
    bits *= 2;
  }
}

std::vector<QAlphaEntry> q_alpha(const std::vector<Convergent>& convergents) {
  std::vector<QAlphaEntry> out;
  for (std::size_t i = 0; i + 1 < convergents.size(); ++i) {
    const auto& cur = convergents[i];
    const auto& next = convergents[i + 1];
    if (mpz_even_p(cur.q.get_mpz_t()) != 0 && next.q >= 2 * cur.q) {
      out.push_back(QAlphaEntry{cur.index, cur.q, next.q});
    }
  }
  return out;
}

bool satisfies_approximation_bounds(const Convergent& current, const mpz_class& q_next) {
  const mpq_class lower(1, 2 * q_next);
  const mpq_class upper(1, q_next);
  return current.dist.lower() > lower && current.dist.upper() < upper;
}

}  // namespace dseries
