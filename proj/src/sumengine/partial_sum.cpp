#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "dseries/compensated.hpp"
#include "dseries/errors.hpp"
#include "dseries/sumengine.hpp"

namespace dseries {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kBlockTerms = std::uint64_t{1} << 16;
// Relative error of one computed |sin| value (argument scaling, sine,
// conversion) together with f(n) and the product; a few ulps, rounded up.
constexpr double kTermRelError = 1e-15;
// Relative error of a sine weight |sin(pi r / q)|.
constexpr double kWeightRelError = 1e-15;
constexpr std::uint64_t kMaxResidueTable = 1'000'000;

u128 to_u128(const mpz_class& z) {
  // z is in [0, 2^128).
  mpz_class lo64, hi64;
  mpz_fdiv_r_2exp(lo64.get_mpz_t(), z.get_mpz_t(), 64);
  mpz_fdiv_q_2exp(hi64.get_mpz_t(), z.get_mpz_t(), 64);
  auto limb = [](const mpz_class& v) -> std::uint64_t {
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof out, 0, 0, v.get_mpz_t());
    return out;
  };
  return (u128(limb(hi64)) << 64) | limb(lo64);
}

// frac(alpha) as a 128-bit fixed-point number A with 0 <= alpha - k - A 2^-128 < 2^-127.
u128 fixed_point_fraction(const RealSource& source) {
  const DyadicInterval d = source.approximate(130);
  mpz_class a;
  if (d.scale >= 128) {
    mpz_fdiv_q_2exp(a.get_mpz_t(), d.lo.get_mpz_t(), static_cast<mp_bitcnt_t>(d.scale - 128));
  } else {
    mpz_mul_2exp(a.get_mpz_t(), d.lo.get_mpz_t(), static_cast<mp_bitcnt_t>(128 - d.scale));
  }
  mpz_fdiv_r_2exp(a.get_mpz_t(), a.get_mpz_t(), 128);
  return to_u128(a);
}

// |sin(pi x)| where x = r 2^-128.
inline double abs_sin_fixed(u128 r) {
  if (r > (u128(1) << 127)) r = -r;  // distance to the nearest integer, now in [0, 1/2]
  const double x = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(r >> 64)), -64);
  return std::sin(std::numbers::pi * x);
}

void check_range(std::uint64_t n, std::uint64_t m, const SumOptions& options) {
  if (m == 0) throw InvalidArgument("M must be at least 1");
  if (n > options.max_terms || m > options.max_terms - n) {
    throw RangeError("N + M exceeds the configured limit of " + std::to_string(options.max_terms) +
                     " terms");
  }
}

// Block boundaries (as term offsets) so that every checkpoint ends a block.
std::vector<std::uint64_t> block_ends(std::uint64_t m, const std::vector<std::uint64_t>& checkpoints) {
  std::vector<std::uint64_t> marks;
  for (auto c : checkpoints) {
    if (c < 1 || c > m) throw InvalidArgument("checkpoint outside [1, M]");
    marks.push_back(c);
  }
  marks.push_back(m);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::vector<std::uint64_t> ends;
  std::uint64_t pos = 0;
  for (auto mark : marks) {
    while (pos < mark) {
      pos = std::min(mark, pos + kBlockTerms);
      ends.push_back(pos);
    }
  }
  return ends;
}

struct Block {
  CompensatedSum sum;
  double term_error = 0;
};

template <typename BlockFn>
std::vector<Block> run_blocks(const std::vector<std::uint64_t>& ends, unsigned workers, BlockFn fn) {
  std::vector<Block> blocks(ends.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ends.size(); i = next++) {
      const std::uint64_t begin = i == 0 ? 0 : ends[i - 1];
      blocks[i] = fn(begin + 1, ends[i]);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(ends.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return blocks;
}

}  // namespace

std::string to_string(SumMode mode) {
  return mode == SumMode::Direct ? "direct" : "periodic";
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t m) {
  std::vector<std::uint64_t> out;
  for (int j = 0; j < 64; ++j) {
    const std::uint64_t c = j == 0 ? m : ((m - 1) >> j) + 1;  // ceil(m / 2^j)
    if (out.empty() || out.back() != c) out.push_back(c);
    if (c == 1) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

PartialSumResult partial_sum_direct(const RealSource& source, const FDescriptor& f,
                                    std::uint64_t n, std::uint64_t m, const SumOptions& options,
                                    std::vector<TracePoint>* trace) {
  check_range(n, m, options);
  const u128 frac = fixed_point_fraction(source);
  // The fixed-point image of alpha is off by < 2^-127, so frac(k alpha) is off by < k 2^-127.
  const double drift_per_index = std::numbers::pi * std::ldexp(1.0, -127);

  auto term = [&](std::uint64_t k, double& err) {
    const double w = abs_sin_fixed(frac * u128(k));
    const double fk = f(static_cast<double>(k));
    err += fk * (kTermRelError + drift_per_index * static_cast<double>(k));
    const double t = fk * w;
    return (k & 1) ? -t : t;
  };

  PartialSumResult result;
  result.mode = SumMode::Direct;
  result.terms = m;

  if (options.reverse) {
    CompensatedSum s;
    double term_error = 0;
    for (std::uint64_t i = m; i >= 1; --i) s.add(term(n + i, term_error));
    result.value = s.value();
    result.rounding_bound = s.error_bound() + term_error * (1 + 1e-6);
    return result;
  }

  const auto ends = block_ends(m, options.checkpoints);
  auto blocks = run_blocks(ends, options.workers, [&](std::uint64_t first, std::uint64_t last) {
    Block b;
    for (std::uint64_t i = first; i <= last; ++i) b.sum.add(term(n + i, b.term_error));
    return b;
  });

  std::vector<std::uint64_t> wanted = options.checkpoints;
  std::sort(wanted.begin(), wanted.end());
  CompensatedSum total;
  double inner = 0, term_error = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    total.add(blocks[i].sum.sigma());
    total.add(blocks[i].sum.err());
    inner += blocks[i].sum.cascade_bound();
    term_error += blocks[i].term_error;
    const double bound = total.error_bound() + inner + term_error * (1 + 1e-6);
    if (trace && std::binary_search(wanted.begin(), wanted.end(), ends[i])) {
      trace->push_back(TracePoint{ends[i], total.value(), bound});
    }
    if (i + 1 == blocks.size()) {
      result.value = total.value();
      result.rounding_bound = bound;
    }
  }
  return result;
}

namespace {

struct ResidueTable {
  std::uint64_t q = 1;
  std::vector<double> weight;  // |sin(pi a h / q)| for h = n mod q
};

ResidueTable residue_table(const mpz_class& a, const mpz_class& q) {
  if (q <= 0) throw InvalidArgument("denominator must be positive");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t());
  if (g != 1) throw InvalidArgument("a and q must be coprime");
  if (q > kMaxResidueTable) {
    throw RangeError("denominator too large for the residue table (limit " +
                     std::to_string(kMaxResidueTable) + ")");
  }
  ResidueTable t;
  t.q = q.get_ui();
  const std::uint64_t ar = mpz_fdiv_ui(a.get_mpz_t(), t.q);
  t.weight.resize(t.q);
  for (std::uint64_t h = 0; h < t.q; ++h) {
    std::uint64_t r = static_cast<std::uint64_t>(u128(ar) * h % t.q);
    if (2 * r > t.q) r = t.q - r;
    t.weight[h] = std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(t.q));
  }
  return t;
}

}  // namespace

PartialSumResult partial_sum_periodic(const mpz_class& a, const mpz_class& q, const FDescriptor& f,
                                      std::uint64_t n, std::uint64_t m, const SumOptions& options,
                                      std::vector<TracePoint>* trace) {
  check_range(n, m, options);
  const ResidueTable table = residue_table(a, q);
  std::vector<CompensatedSum> acc(table.q);
  double f_total = 0;

  auto combine = [&]() {
    CompensatedSum total;
    double err = 0;
    for (std::uint64_t h = 0; h < table.q; ++h) {
      if (acc[h].count() == 0) continue;
      const double w = table.weight[h];
      const double s = acc[h].value();
      const double p = w * s;
      total.add(p);
      total.add(std::fma(w, s, -p));
      err += w * acc[h].error_bound() + std::abs(s) * w * kWeightRelError;
    }
    // f(n) itself carries about one rounding error.
    err += 4 * kUnitRoundoff * f_total;
    return TracePoint{0, total.value(), (total.error_bound() + err) * (1 + 1e-6)};
  };

  std::vector<std::uint64_t> wanted = options.checkpoints;
  for (auto c : wanted) {
    if (c < 1 || c > m) throw InvalidArgument("checkpoint outside [1, M]");
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  auto next_mark = wanted.begin();

  auto add = [&](std::uint64_t i) {
    const std::uint64_t k = n + i;
    const double fk = f(static_cast<double>(k));
    f_total += fk;
    acc[k % table.q].add((k & 1) ? -fk : fk);
  };

  if (options.reverse) {
    for (std::uint64_t i = m; i >= 1; --i) add(i);
  } else {
    for (std::uint64_t i = 1; i <= m; ++i) {
      add(i);
      if (trace && next_mark != wanted.end() && *next_mark == i) {
        TracePoint tp = combine();
        tp.m = i;
        trace->push_back(tp);
        ++next_mark;
      }
    }
  }
  const TracePoint end = combine();
  PartialSumResult result;
  result.mode = SumMode::PeriodicRational;
  result.terms = m;
  result.value = end.value;
  result.rounding_bound = end.rounding_bound;
  return result;
}

RunningMax max_abs_running_sum(const mpz_class& a, const mpz_class& q, const FDescriptor& f,
                               std::uint64_t n, std::uint64_t m) {
  if (m == 0) throw InvalidArgument("M must be at least 1");
  const ResidueTable table = residue_table(a, q);
  CompensatedSum s;
  double term_error = 0;
  RunningMax out;
  std::uint64_t h = (n + 1) % table.q;
  for (std::uint64_t i = 1; i <= m; ++i) {
    const std::uint64_t k = n + i;
    const double fk = f(static_cast<double>(k));
    const double t = fk * table.weight[h];
    term_error += fk * (kWeightRelError + 4 * kUnitRoundoff);
    s.add((k & 1) ? -t : t);
    const double v = std::abs(s.value());
    if (v > out.max_abs) {
      out.max_abs = v;
      out.at_m = i;
    }
    if (++h == table.q) h = 0;
  }
  out.rounding_bound =
      (2 * kUnitRoundoff * out.max_abs + s.cascade_bound() + term_error) * (1 + 1e-6);
  return out;
}

}  // namespace dseries
