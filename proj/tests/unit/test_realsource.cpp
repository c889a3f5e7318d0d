#include <doctest.h>

#include <random>
#include <thread>

#include "dseries/errors.hpp"
#include "dseries/realsource.hpp"

using namespace dseries;

namespace {

// arctan(1/x) bracketed by consecutive partial sums of its alternating series.
std::pair<mpq_class, mpq_class> arctan_inverse(long x, int terms) {
  mpq_class sum = 0, last = 0;
  mpz_class power = x;
  for (int k = 0; k <= terms; ++k) {
    mpq_class t(1, power * (2 * k + 1));
    t.canonicalize();
    last = sum;
    sum += (k % 2 == 0) ? t : mpq_class(-t);
    power *= x * x;
  }
  return sum < last ? std::pair{sum, last} : std::pair{last, sum};
}

std::pair<mpq_class, mpq_class> pi_oracle() {
  const auto [a_lo, a_hi] = arctan_inverse(5, 160);
  const auto [b_lo, b_hi] = arctan_inverse(239, 60);
  return {16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo};
}

std::pair<mpq_class, mpq_class> e_oracle() {
  mpq_class sum = 0;
  mpz_class fact = 1;
  for (int k = 0; k <= 120; ++k) {
    if (k > 0) fact *= k;
    sum += mpq_class(1, fact);
  }
  // Tail after 1/120! is below 2/121!.
  return {sum, sum + mpq_class(2, fact * 121)};
}

void check_encloses(const DyadicInterval& d, const std::pair<mpq_class, mpq_class>& oracle) {
  CHECK(d.lower() <= oracle.first);
  CHECK(oracle.second <= d.upper());
}

}  // namespace

TEST_CASE("named constants agree with independent series oracles") {
  const auto pi = pi_oracle();
  const auto e = e_oracle();
  REQUIRE(pi.second - pi.first < mpq_class(1, mpz_class(1) << 600));
  for (std::int64_t bits : {64, 256, 512}) {
    check_encloses(make_constant(Constant::Pi).approximate(bits), pi);
    check_encloses(make_constant(Constant::E).approximate(bits), e);
    const mpq_class inv_lo = 1 / pi.second, inv_hi = 1 / pi.first;
    check_encloses(make_constant(Constant::InvPi).approximate(bits), {inv_lo, inv_hi});
  }
}

TEST_CASE("approximate is canonical, narrow and nested") {
  const std::vector<RealSource> sources = {
      make_constant(Constant::Pi), make_surd(0, 1, 2, 1), make_rational(355, 113),
      make_surd(1, -3, 7, 2), make_cf_stream({1}, {1})};
  for (const auto& s : sources) {
    DyadicInterval prev = s.approximate(8);
    for (std::int64_t bits = 9; bits <= 700; bits += 37) {
      const DyadicInterval d = s.approximate(bits);
      CHECK(d.width_at_most_pow2(bits));
      CHECK(prev.contains(d));
      CHECK(d.lo == s.approximate(bits).lo);  // deterministic
      prev = d;
    }
  }
}

TEST_CASE("surd enclosures bracket the square root exactly") {
  const RealSource r2 = make_surd(0, 1, 2, 1);
  for (std::int64_t bits : {64, 200, 1000, 4000}) {
    const auto enc = r2.enclose(bits);
    CHECK(enc.lo * enc.lo < 2);
    CHECK(enc.hi * enc.hi > 2);
    CHECK(enc.hi - enc.lo <= mpq_class(1, mpz_class(1) << bits));
  }
  // (1 - 3 sqrt 7)/2 is negative; check through the defining quadratic.
  const auto enc = make_surd(1, -3, 7, 2).enclose(300);
  const auto g = [](const mpq_class& x) -> mpq_class { return (2 * x - 1) * (2 * x - 1) - 63; };
  CHECK(enc.hi < 0);
  CHECK(g(enc.lo) > 0);
  CHECK(g(enc.hi) < 0);
}

TEST_CASE("continued-fraction streams") {
  const RealSource s = make_cf_stream({1}, {2});
  const auto a = s.approximate(300), b = make_surd(0, 1, 2, 1).approximate(300);
  CHECK(a.lo == b.lo);
  CHECK(s.has_exact_partial_quotients());
  CHECK(*s.stream_quotient(0) == 1);
  CHECK(*s.stream_quotient(7) == 2);
  CHECK(make_cf_stream({1}, {1}).eventually_all_ones());
  CHECK_FALSE(s.eventually_all_ones());

  const RealSource finite = make_cf_stream({3, 7, 16});
  REQUIRE(finite.is_rational());
  CHECK(*finite.exact_value() == mpq_class(355, 113));
  CHECK_FALSE(finite.stream_quotient(3).has_value());
  CHECK_THROWS_AS(make_cf_stream({1, 0, 2}), InvalidArgument);
}

TEST_CASE("rational sources reduce and enclose exactly") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 100; ++i) {
    const long q = 1 + static_cast<long>(rng() % 5000);
    const long a = static_cast<long>(rng() % 20000) - 10000;
    const RealSource s = make_rational(a, q);
    mpq_class v(a, q);
    v.canonicalize();
    CHECK(*s.exact_value() == v);
    const auto d = s.approximate(100);
    CHECK(d.contains(v));
    CHECK(d.width_at_most_pow2(100));
  }
  CHECK_THROWS_AS(make_rational(1, 0), InvalidArgument);
}

TEST_CASE("invalid sources are rejected") {
  CHECK_THROWS_AS(make_surd(0, 1, 4, 1), InvalidArgument);
  CHECK_THROWS_AS(make_surd(0, 1, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(make_surd(0, 0, 2, 1), InvalidArgument);
  CHECK_THROWS_AS(make_surd(0, 1, -2, 1), InvalidArgument);
  CHECK_THROWS_AS(constant_from_name("gamma"), InvalidArgument);
  CHECK_THROWS_AS(make_constant(Constant::Pi, 10), InvalidArgument);
}

TEST_CASE("precision cap is an explicit error") {
  const RealSource s = make_constant(Constant::Pi, 256);
  CHECK_NOTHROW(s.approximate(256));
  CHECK_THROWS_AS(s.approximate(257), PrecisionCapError);
  CHECK(s.with_max_bits(1024).approximate(1000).width_at_most_pow2(1000));
}

TEST_CASE("concurrent readers see identical enclosures") {
  const RealSource s = make_constant(Constant::E);
  const auto reference = make_constant(Constant::E).approximate(2048);
  std::vector<std::thread> threads;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      bool good = true;
      for (std::int64_t bits = 64 + t; bits <= 2048; bits += 97) {
        const auto d = s.approximate(bits);
        good = good && d.contains(reference);
      }
      good = good && s.approximate(2048).lo == reference.lo;
      ok[t] = good;
    });
  }
  for (auto& th : threads) th.join();
  for (int v : ok) CHECK(v == 1);
}

TEST_CASE("Liouville exponents and partial sums") {
  CHECK(*liouville_exponent(ExponentSchedule::Factorial, 1) == 1);
  CHECK(*liouville_exponent(ExponentSchedule::Factorial, 3) == 6);
  CHECK(*liouville_exponent(ExponentSchedule::Factorial, 5) == 120);
  CHECK(*liouville_exponent(ExponentSchedule::Tower100, 1) == 1);
  CHECK(*liouville_exponent(ExponentSchedule::Tower100, 2) == 100);
  CHECK_FALSE(liouville_exponent(ExponentSchedule::Tower100, 3).has_value());
  CHECK_FALSE(liouville_exponent(ExponentSchedule::Factorial, 30).has_value());

  LiouvilleSpec spec;
  CHECK(liouville_partial_sum(spec, 3) == mpq_class(110001, 1000000));
  spec.digits = {1, 3};
  CHECK(liouville_partial_sum(spec, 3) == mpq_class(130001, 1000000));  // 0.1 + 0.03 + 0.000001
  spec.digits = {3};
  spec.a = 1;
  spec.q = 7;
  spec.start = 2;
  mpq_class expect = mpq_class(1, 7) + mpq_class(3, 100) + mpq_class(3, 1000000);
  expect.canonicalize();
  CHECK(liouville_partial_sum(spec, 3) == expect);

  // lambda_N < lambda < lambda_N + (10/3) 10^{-e_{N+1}}
  const LiouvilleSpec plain;
  const RealSource xi = make_liouville(plain);
  const auto enc = xi.enclose(400);
  const mpq_class l4 = liouville_partial_sum(plain, 4);
  CHECK(enc.lo > l4);
  mpz_class p120;
  mpz_ui_pow_ui(p120.get_mpz_t(), 10, 120);
  CHECK(enc.hi < l4 + mpq_class(10, 3 * p120));
  CHECK(*liouville_tail_log10(plain, 4) == doctest::Approx(std::log10(10.0 / 3.0) - 120));
}

TEST_CASE("Liouville parameter validation") {
  LiouvilleSpec bad;
  bad.digits = {2};
  CHECK_THROWS_AS(make_liouville(bad), InvalidArgument);
  LiouvilleSpec bad_base;
  bad_base.a = 2;
  bad_base.q = 4;
  CHECK_THROWS_AS(make_liouville(bad_base), InvalidArgument);
  LiouvilleSpec bad_start;
  bad_start.start = 0;
  CHECK_THROWS_AS(make_liouville(bad_start), InvalidArgument);
  LiouvilleSpec huge;
  CHECK_THROWS_AS(liouville_partial_sum(huge, 12, 1 << 20), PrecisionCapError);
}
