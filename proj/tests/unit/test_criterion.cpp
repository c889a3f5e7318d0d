#include <doctest.h>

#include <cmath>
#include <random>

#include "dseries/criterion.hpp"
#include "dseries/errors.hpp"

using namespace dseries;

namespace {

// Composite Simpson rule for integral_a^b f on n panels.
template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

RealSource sqrt2() { return make_surd(0, 1, 2, 1); }

}  // namespace

TEST_CASE("power weights") {
  const FDescriptor one = FDescriptor::power(1);
  CHECK(one.antiderivative(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const FDescriptor half = FDescriptor::power(0.5);
  CHECK(half.antiderivative(4) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(half(4) == doctest::Approx(0.5));
  CHECK(half.integral(4, 9) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(one.integral(1e8, 1e8 + 1) == doctest::Approx(1e-8).epsilon(1e-6));
  CHECK_THROWS_AS(FDescriptor::power(1.5), InvalidArgument);
  CHECK_THROWS_AS(FDescriptor::power(0), InvalidArgument);
  CHECK(parse_f_spec("pow:0.25").exponent() == 0.25);
  CHECK(parse_f_spec("pow:0.25").spec() == "pow:0.25");
  CHECK(parse_f_spec("logrec").kind() == FKind::LogReciprocal);
  CHECK_THROWS_AS(parse_f_spec("pow:"), InvalidArgument);
  CHECK_THROWS_AS(parse_f_spec("pow:0.5x"), InvalidArgument);
  CHECK_THROWS_AS(parse_f_spec("exp"), InvalidArgument);
}

TEST_CASE("log-space antiderivative matches the direct one") {
  for (const auto& f : {FDescriptor::power(1), FDescriptor::power(0.5), FDescriptor::power(0.9),
                        FDescriptor::log_reciprocal()}) {
    for (double x : {2.0, 10.0, 1e5, 1e100}) {
      CHECK(*f.log_antiderivative(std::log(x)) ==
            doctest::Approx(std::log(f.antiderivative(x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("weight validation") {
  const auto r1 = validate_f(FDescriptor::power(1), SamplingGrid{1e6, 400});
  CHECK(r1.ok);
  CHECK(FDescriptor::power(1).antiderivative(1e6) == doctest::Approx(13.815510557964274));
  CHECK(validate_f(FDescriptor::power(0.5)).ok);
  CHECK(validate_f(FDescriptor::log_reciprocal()).ok);

  const auto broken = FDescriptor::custom(
      "broken", [](double x) { return 1 / x; }, [](double x) { return x * x - 1; });
  const auto rb = validate_f(broken);
  CHECK_FALSE(rb.ok);
  bool derivative_flagged = false;
  for (const auto& v : rb.violations) derivative_flagged |= v.check == "derivative";
  CHECK(derivative_flagged);

  // A summable weight flagged as divergent is caught.
  const auto summable = FDescriptor::custom(
      "x^-2", [](double x) { return 1 / (x * x); }, [](double x) { return 1 - 1 / x; });
  const auto rs = validate_f(summable);
  CHECK_FALSE(rs.ok);
  bool divergence_flagged = false;
  for (const auto& v : rs.violations) divergence_flagged |= v.check == "divergence";
  CHECK(divergence_flagged);
}

TEST_CASE("criterion terms") {
  const FDescriptor half = FDescriptor::power(0.5);
  const auto s = criterion_partial_sum({QAlphaEntry{2, 2, 5}}, half);
  REQUIRE(s.terms.size() == 1);
  CHECK(s.terms[0].value == doctest::Approx(0.6180339887498949).epsilon(1e-14));
  const double quad = simpson([](double x) { return 1 / std::sqrt(x); }, 1, 5, 2000) / 4;
  CHECK(s.terms[0].value == doctest::Approx(quad).epsilon(1e-10));

  const auto inv_pi = expand(make_constant(Constant::InvPi), 20);
  const auto inv_sum = criterion_partial_sum(q_alpha(inv_pi.convergents), FDescriptor::power(1));
  REQUIRE_FALSE(inv_sum.terms.empty());
  CHECK(inv_sum.terms[0].q == 22);
  CHECK(inv_sum.terms[0].q_next == 333);
  CHECK(inv_sum.terms[0].value == doctest::Approx(std::log(333.0) / 484).epsilon(1e-14));
  CHECK(inv_sum.terms[0].value == doctest::Approx(0.0120003).epsilon(1e-5));

  // sqrt 2: every second denominator, with q_{n+1} = 2 q_n + q_{n-1}.
  const auto r2 = expand(sqrt2(), 21);
  const auto r2_sum = criterion_partial_sum(q_alpha(r2.convergents), FDescriptor::power(1));
  REQUIRE(r2_sum.terms.size() == 10);
  std::vector<long double> d = {1, 2};
  while (d.size() < 24) d.push_back(2 * d.back() + d[d.size() - 2]);
  long double oracle = 0;
  for (int k = 0; k < 10; ++k) oracle += std::log(d[2 * k + 2]) / (d[2 * k + 1] * d[2 * k + 1]);
  CHECK(r2_sum.sum == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-13));
  CHECK(r2_sum.sum == doctest::Approx(0.426833).epsilon(1e-6));

  CHECK(criterion_partial_sum({}, half).sum == 0);
}

TEST_CASE("partial sums are non-decreasing") {
  for (const auto& s : {make_constant(Constant::Pi), make_constant(Constant::E), sqrt2(),
                        make_surd(1, 2, 3, 5)}) {
    const auto sum = criterion_partial_sum(q_alpha(expand(s, 40).convergents), FDescriptor::power(0.5));
    double prev = 0;
    for (const auto& t : sum.terms) {
      CHECK(t.value > 0);
      CHECK(t.running_sum >= prev);
      prev = t.running_sum;
    }
  }
}

TEST_CASE("huge denominators go through log space") {
  mpz_class q, qn;
  mpz_ui_pow_ui(q.get_mpz_t(), 10, 120);
  mpz_ui_pow_ui(qn.get_mpz_t(), 10, 600);
  const auto s = criterion_partial_sum({QAlphaEntry{31, q, qn}}, FDescriptor::power(0.5));
  CHECK(s.overflow == false);
  CHECK(s.terms[0].log10_value == doctest::Approx(300 + std::log10(2.0) - 240).epsilon(1e-12));
  CHECK(*criterion_term_log10(120, 600, FDescriptor::power(0.5)) ==
        doctest::Approx(s.terms[0].log10_value).epsilon(1e-12));
  mpz_ui_pow_ui(qn.get_mpz_t(), 10, 2000);
  const auto big = criterion_partial_sum({QAlphaEntry{31, q, qn}}, FDescriptor::power(0.5));
  CHECK(big.overflow);
  CHECK(std::isinf(big.terms[0].value));
  CHECK(big.log10_sum == doctest::Approx(1000 + std::log10(2.0) - 240).epsilon(1e-12));
  const auto custom = FDescriptor::custom(
      "inv", [](double x) { return 1 / x; }, [](double x) { return std::log(x); });
  CHECK_THROWS_AS(criterion_partial_sum({QAlphaEntry{31, q, qn}}, custom), RangeError);
}

TEST_CASE("tail bounds from an irrationality measure") {
  const auto roth = measure_tail_bound(2.5, 1, 1.0, mpz_class(1000000));
  REQUIRE(roth);
  CHECK(*roth < 1e-4);
  // Independent evaluation of the same majorant: 2 sum_k g(x0 2^k).
  double majorant = 0;
  for (int k = 0; k < 200; ++k) {
    const double q = 1e6 * std::ldexp(1.0, k);
    majorant += 2 * 1.5 * std::log(q) / (q * q);
  }
  CHECK(*roth >= majorant * (1 - 1e-12));
  CHECK(measure_tail_bound(42, 10, 1.0, mpz_class(1000)).has_value());
  CHECK_FALSE(measure_tail_bound(42, 1, 0.5, mpz_class(1000)).has_value());
  CHECK(measure_tail_bound(2.5, 1, 0.5, mpz_class(100)).has_value());
  CHECK_FALSE(measure_tail_bound(3.5, 1, FDescriptor::custom("c", [](double x) { return 1 / x; },
                                                               [](double x) { return std::log(x); }),
                                 mpz_class(100))
                   .has_value());
  CHECK_THROWS_AS(measure_tail_bound(1.5, 1, 1.0, mpz_class(10)), InvalidArgument);
}

TEST_CASE("classification examples") {
  const FDescriptor one = FDescriptor::power(1), half = FDescriptor::power(0.5);
  auto v = classify(make_rational(2, 3), one);
  CHECK(v.outcome == Outcome::Converges);
  CHECK(v.certificate == CertificateKind::RationalOddQ);
  v = classify(make_rational(1, 2), FDescriptor::log_reciprocal());
  CHECK(v.outcome == Outcome::Diverges);
  CHECK(v.certificate == CertificateKind::RationalEvenQ);
  v = classify(make_rational(6, 4), one);
  CHECK(v.reduced_q == 2);

  v = classify(make_constant(Constant::InvPi), one, {}, {cert::MahlerPi{}});
  CHECK(v.outcome == Outcome::Converges);
  CHECK(v.certificate == CertificateKind::CriterionBounded);
  CHECK(*v.tail_source == CertificateKind::MahlerPi);

  v = classify(sqrt2(), half, {}, {cert::RothAlgebraic{}});
  CHECK(v.outcome == Outcome::Converges);
  CHECK(*v.tail_source == CertificateKind::RothAlgebraic);

  v = classify(make_liouville(LiouvilleSpec{}), half);
  CHECK(v.outcome == Outcome::Diverges);
  CHECK(v.certificate == CertificateKind::LiouvilleFamily);
  v = classify(make_liouville(LiouvilleSpec{}), one);
  CHECK(v.outcome == Outcome::Inconclusive);
  LiouvilleSpec tower;
  tower.schedule = ExponentSchedule::Tower100;
  v = classify(make_liouville(tower), one);
  CHECK(v.outcome == Outcome::Diverges);

  v = classify(make_constant(Constant::E), one);
  CHECK(v.outcome == Outcome::Inconclusive);
  CHECK(v.certificate == CertificateKind::Evidence);
  CHECK(v.convergents_examined == 40);

  // Mahler at p < 1 does not bound the series.
  v = classify(make_constant(Constant::Pi), half, {}, {cert::MahlerPi{}});
  CHECK(v.outcome == Outcome::Inconclusive);
  // A user measure.
  v = classify(make_constant(Constant::E), half, {}, {cert::Measure{{2.0, 1.0}}});
  CHECK(v.outcome == Outcome::Converges);
  CHECK(*v.tail_source == CertificateKind::IrrationalityMeasure);
}

TEST_CASE("structural all-ones tails") {
  auto v = classify(make_cf_stream({1}, {1}), FDescriptor::power(1));
  CHECK(v.outcome == Outcome::Converges);
  CHECK(v.certificate == CertificateKind::QAlphaEmptyStructural);
  v = classify(make_surd(1, 1, 5, 2), FDescriptor::power(0.3), {}, {cert::AllOnesTail{1}});
  CHECK(v.certificate == CertificateKind::QAlphaEmptyStructural);
  v = classify(make_cf_stream({0, 5, 2}, {1}), FDescriptor::power(0.3));
  CHECK(v.outcome == Outcome::Converges);
  // Without the declaration, phi as a surd is only evidence.
  v = classify(make_surd(1, 1, 5, 2), FDescriptor::power(0.3));
  CHECK(v.outcome == Outcome::Inconclusive);
  CHECK(v.evidence.terms.empty());
}

TEST_CASE("certificates that do not fit the source are rejected") {
  const FDescriptor one = FDescriptor::power(1);
  CHECK_THROWS_AS(classify(make_constant(Constant::E), one, {}, {cert::MahlerPi{}}), InvalidArgument);
  CHECK_THROWS_AS(classify(make_constant(Constant::Pi), one, {}, {cert::RothAlgebraic{}}),
                  InvalidArgument);
  CHECK_THROWS_AS(classify(sqrt2(), one, {}, {cert::AllOnesTail{1}}), InvalidArgument);
  CHECK_THROWS_AS(classify(sqrt2(), one, {}, {cert::Measure{{1.0, 1.0}}}), InvalidArgument);
  CHECK_THROWS_AS(classify(make_rational(1, 3), one, {}, {cert::MahlerPi{}}), InvalidArgument);
}

TEST_CASE("rationals are decided by the parity of the reduced denominator") {
  std::mt19937_64 rng(2024);
  const FDescriptor f = FDescriptor::power(0.7);
  for (int i = 0; i < 200; ++i) {
    const long q = 1 + static_cast<long>(rng() % 1000);
    long a = static_cast<long>(rng() % (4 * q)) - 2 * q;
    mpq_class v(a, q);
    v.canonicalize();
    const auto verdict = classify(make_rational(a, q), f);
    const bool odd = mpz_odd_p(v.get_den().get_mpz_t());
    CHECK(verdict.outcome == (odd ? Outcome::Converges : Outcome::Diverges));
  }
}

TEST_CASE("certified bounds dominate longer expansions") {
  struct Case {
    RealSource source;
    FDescriptor f;
    CertificateInput cert;
  };
  const std::vector<Case> cases = {
      {make_constant(Constant::InvPi), FDescriptor::power(1), cert::MahlerPi{}},
      {make_constant(Constant::Pi), FDescriptor::power(1), cert::MahlerPi{}},
      {sqrt2(), FDescriptor::power(0.5), cert::RothAlgebraic{}},
      {make_surd(2, 1, 13, 3), FDescriptor::power(0.2), cert::RothAlgebraic{}},
      {make_constant(Constant::E), FDescriptor::log_reciprocal(), cert::Measure{{2.2, 3.0}}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.source.describe());
    Budget budget;
    budget.max_convergents = 20;
    const Verdict v = classify(c.source, c.f, budget, {c.cert});
    REQUIRE(v.outcome == Outcome::Converges);
    REQUIRE(v.certificate == CertificateKind::CriterionBounded);
    double explicit_sum = 0;
    for (const auto& t : v.evidence.terms) {
      if (t.q < *v.tail_from_q) explicit_sum += t.value;
    }
    const double total = explicit_sum + *v.tail_bound;
    CHECK(std::isfinite(total));
    for (std::size_t b : {40u, 80u}) {
      budget.max_convergents = b;
      const Verdict longer = classify(c.source, c.f, budget, {c.cert});
      CHECK(longer.outcome == v.outcome);
      CHECK(longer.evidence.sum <= total);
    }
  }
}

TEST_CASE("doubling the budget never overturns a decision") {
  const std::vector<RealSource> sources = {make_rational(5, 12), make_cf_stream({2}, {1}),
                                           make_liouville(LiouvilleSpec{}), make_constant(Constant::E)};
  for (const auto& s : sources) {
    Budget small, large;
    small.max_convergents = 10;
    large.max_convergents = 20;
    const auto a = classify(s, FDescriptor::power(0.5), small);
    const auto b = classify(s, FDescriptor::power(0.5), large);
    if (a.outcome != Outcome::Inconclusive) CHECK(b.outcome == a.outcome);
    if (a.outcome == Outcome::Inconclusive) CHECK(a.certificate == CertificateKind::Evidence);
    else CHECK(a.certificate != CertificateKind::Evidence);
  }
}
