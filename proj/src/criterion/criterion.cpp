#include "dseries/criterion.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

#include "dseries/errors.hpp"

namespace dseries {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kLn2 = 0.693147180559945309;

double ln_of(const mpz_class& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * kLn2;
}

// log10(10^a + 10^b) without leaving log space.
double log10_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log10(1.0 + std::pow(10.0, lo - hi));
}

bool fits_double(const mpz_class& z, std::size_t bits) {
  return mpz_sizeinbase(z.get_mpz_t(), 2) <= bits;
}

std::string format_measure(const MeasureBound& m) {
  std::ostringstream os;
  os << "mu = " << m.mu << ", C = " << m.c;
  return os.str();
}

}  // namespace

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Converges: return "Converges";
    case Outcome::Diverges: return "Diverges";
    case Outcome::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::RationalOddQ: return "RationalOddQ";
    case CertificateKind::RationalEvenQ: return "RationalEvenQ";
    case CertificateKind::CriterionBounded: return "CriterionBounded";
    case CertificateKind::IrrationalityMeasure: return "IrrationalityMeasure";
    case CertificateKind::RothAlgebraic: return "RothAlgebraic";
    case CertificateKind::MahlerPi: return "MahlerPi";
    case CertificateKind::LiouvilleFamily: return "LiouvilleFamily";
    case CertificateKind::QAlphaEmptyStructural: return "QAlphaEmptyStructural";
    case CertificateKind::Evidence: return "Evidence";
  }
  return "?";
}

std::optional<double> criterion_term_log10(double log10_q, double log10_q_next,
                                           const FDescriptor& f) {
  const auto log_F = f.log_antiderivative(log10_q_next * kLn10);
  if (!log_F) return std::nullopt;
  return *log_F / kLn10 - 2.0 * log10_q;
}

CriterionSum criterion_partial_sum(const std::vector<QAlphaEntry>& entries, const FDescriptor& f) {
  CriterionSum out;
  for (const auto& e : entries) {
    CriterionTerm t;
    t.index = e.index;
    t.q = e.q;
    t.q_next = e.q_next;
    if (fits_double(e.q_next, 1000) && fits_double(e.q, 500)) {
      const double q = e.q.get_d();
      const double F = f.antiderivative(e.q_next.get_d());
      t.value = F / (q * q);
      t.log10_value = std::log10(t.value);
      t.rel_error = 16 * DBL_EPSILON;
    } else {
      const double lq = ln_of(e.q);
      const double lqn = ln_of(e.q_next);
      const auto log_F = f.log_antiderivative(lqn);
      if (!log_F) {
        throw RangeError("criterion term for q = " + e.q.get_str() +
                         " is beyond double range and the weight has no log-space form");
      }
      const double lv = *log_F - 2.0 * lq;
      t.log10_value = lv / kLn10;
      t.value = t.log10_value > 300 ? std::numeric_limits<double>::infinity() : std::exp(lv);
      t.rel_error = 8 * DBL_EPSILON * (std::abs(*log_F) + 2 * lq + 1);
      if (std::isinf(t.value)) out.overflow = true;
    }
    out.sum += t.value;
    out.log10_sum = log10_add(out.log10_sum, t.log10_value);
    t.running_sum = out.sum;
    t.running_log10 = out.log10_sum;
    out.terms.push_back(std::move(t));
  }
  return out;
}

std::optional<double> measure_tail_bound(double mu, double c, double p, const mpz_class& from_q) {
  if (!(mu >= 2) || !(c > 0) || !std::isfinite(mu) || !std::isfinite(c)) {
    throw InvalidArgument("measure bound needs mu >= 2 and C > 0");
  }
  if (!(p > 0) || p > 1) throw InvalidArgument("exponent p must lie in (0, 1]");
  const double cc = std::max(c, 1.0);
  const double lx0 = std::max(ln_of(from_q < 2 ? mpz_class(2) : from_q), kLn2);
  // Denominators at least double every two steps, so the entries from x0 on
  // are dominated by two copies of the sequence x0 2^k.
  if (p == 1.0) {
    const double lead = std::log(cc) + (mu - 1) * lx0;
    return 2.0 * std::exp(-2.0 * lx0) * (lead * 4.0 / 3.0 + (mu - 1) * kLn2 * 4.0 / 9.0);
  }
  const double e = (mu - 1) * (1 - p) - 2;
  if (e >= 0) return std::nullopt;
  const double log_g0 = (1 - p) * std::log(cc) + e * lx0 - std::log(1 - p);
  return 2.0 * std::exp(log_g0) / (1 - std::exp2(e));
}

std::optional<double> measure_tail_bound(double mu, double c, const FDescriptor& f,
                                         const mpz_class& from_q) {
  if (f.kind() == FKind::Power) return measure_tail_bound(mu, c, f.exponent(), from_q);
  // 1 + ln x <= x gives ln(1 + ln Q) <= ln Q, so the x^-1 bound dominates.
  if (f.kind() == FKind::LogReciprocal) return measure_tail_bound(mu, c, 1.0, from_q);
  if (!(mu >= 2) || !(c > 0)) throw InvalidArgument("measure bound needs mu >= 2 and C > 0");
  if (mu >= 3) return std::nullopt;
  const double lx0 = std::max(ln_of(from_q < 2 ? mpz_class(2) : from_q), kLn2);
  const double e = mu - 3;
  return 2.0 * f(1.0) * std::max(c, 1.0) * std::exp(e * lx0) / (1 - std::exp2(e));
}

namespace {

bool is_algebraic_irrational(const RealSource& s) {
  if (s.kind() == SourceKind::QuadraticSurd) return true;
  if (s.kind() == SourceKind::PartialQuotientStream) return !s.is_rational();
  return false;
}

bool is_pi_like(const RealSource& s) {
  if (s.kind() != SourceKind::NamedConstant) return false;
  const auto name = std::get<ConstantParams>(s.params()).name;
  return name == Constant::Pi || name == Constant::InvPi;
}

struct MeasureCandidate {
  MeasureBound bound;
  CertificateKind kind;
};

std::vector<MeasureCandidate> check_certificates(const RealSource& source,
                                                 const std::vector<CertificateInput>& certs) {
  std::vector<MeasureCandidate> out;
  for (const auto& c : certs) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, cert::RothAlgebraic>) {
            if (!is_algebraic_irrational(source)) {
              throw InvalidArgument("the Roth certificate applies only to algebraic irrationals, not " +
                                    source.describe());
            }
            out.push_back({MeasureBound{2.5, 1.0}, CertificateKind::RothAlgebraic});
          } else if constexpr (std::is_same_v<T, cert::MahlerPi>) {
            if (!is_pi_like(source)) {
              throw InvalidArgument("the Mahler certificate applies only to pi and 1/pi, not " +
                                    source.describe());
            }
            if (!(v.c > 0) || !std::isfinite(v.c)) {
              throw InvalidArgument("the Mahler constant must be positive");
            }
            out.push_back({MeasureBound{42.0, v.c}, CertificateKind::MahlerPi});
          } else if constexpr (std::is_same_v<T, cert::Measure>) {
            if (!(v.bound.mu >= 2) || !(v.bound.c > 0) || !std::isfinite(v.bound.mu) ||
                !std::isfinite(v.bound.c)) {
              throw InvalidArgument("an irrationality-measure certificate needs mu >= 2 and C > 0");
            }
            out.push_back({v.bound, CertificateKind::IrrationalityMeasure});
          }
        },
        c);
  }
  return out;
}

bool measure_applies(const FDescriptor& f, const MeasureBound& m) {
  if (f.kind() == FKind::Power) return (m.mu - 1) * (1 - f.exponent()) < 2;
  if (f.kind() == FKind::LogReciprocal) return true;
  return m.mu < 3;
}

// First index n0 such that every observed pair from n0 on satisfies
// q_{n+1} <= C q_n^{mu - 1}.
std::size_t eventual_start(const std::vector<Convergent>& convs, const MeasureBound& m) {
  std::size_t start = 0;
  const double lc = std::log(m.c);
  for (std::size_t i = 0; i + 1 < convs.size(); ++i) {
    const double lhs = ln_of(convs[i + 1].q);
    const double rhs = lc + (m.mu - 1) * ln_of(convs[i].q);
    if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) start = i + 1;
  }
  return start;
}

}  // namespace

Verdict classify(const RealSource& source, const FDescriptor& f, const Budget& budget,
                 const std::vector<CertificateInput>& certs) {
  Verdict v;
  v.f_spec = f.spec();
  v.alpha = source.describe();

  const auto measures = check_certificates(source, certs);

  if (const auto exact = source.exact_value()) {
    v.reduced_a = exact->get_num();
    v.reduced_q = exact->get_den();
    const bool odd = mpz_odd_p(v.reduced_q.get_mpz_t()) != 0;
    v.outcome = odd ? Outcome::Converges : Outcome::Diverges;
    v.certificate = odd ? CertificateKind::RationalOddQ : CertificateKind::RationalEvenQ;
    if (!certs.empty()) v.notes.push_back("certificates ignored: rational input is decided exactly");
    return v;
  }

  const RealSource capped = budget.max_bits > 0 ? source.with_max_bits(budget.max_bits) : source;
  ExpandLimits limits;
  limits.count = budget.max_convergents;
  Expansion ex;
  try {
    ex = expand(capped, limits);
  } catch (const PrecisionCapError& e) {
    ex.status = ExpandStatus::PrecisionCap;
    v.notes.push_back(std::string("expansion stopped: ") + e.what());
  }
  v.expansion_status = ex.status;
  v.convergents_examined = ex.convergents.size();
  const auto entries = q_alpha(ex.convergents);
  v.evidence = criterion_partial_sum(entries, f);
  if (ex.status == ExpandStatus::PrecisionCap) {
    v.notes.push_back("precision cap reached after " + std::to_string(ex.convergents.size()) +
                      " convergents");
  }

  // Structural emptiness of Q_alpha beyond a finite prefix.
  std::optional<std::size_t> ones_from;
  if (source.eventually_all_ones()) {
    const auto& p = std::get<CfStreamParams>(source.params());
    ones_from = p.prefix.size();
  }
  for (const auto& c : certs) {
    if (const auto* tail = std::get_if<cert::AllOnesTail>(&c)) {
      for (std::size_t k = tail->from_index; k < ex.partial_quotients.size(); ++k) {
        if (ex.partial_quotients[k] != 1) {
          throw InvalidArgument("all-ones certificate contradicted: partial quotient " +
                                std::to_string(k) + " is " + ex.partial_quotients[k].get_str());
        }
      }
      if (tail->from_index >= ex.partial_quotients.size()) {
        v.notes.push_back("all-ones certificate starts beyond the computed quotients; accepted unchecked");
      }
      if (!ones_from || tail->from_index < *ones_from) ones_from = tail->from_index;
    }
  }
  if (ones_from) {
    v.outcome = Outcome::Converges;
    v.certificate = CertificateKind::QAlphaEmptyStructural;
    v.notes.push_back("partial quotients equal 1 from index " + std::to_string(*ones_from) +
                      " on, so only finitely many q_n can have q_{n+1} >= 2 q_n");
    return v;
  }

  for (const auto& m : measures) {
    if (!measure_applies(f, m.bound)) {
      v.notes.push_back(to_string(m.kind) + " certificate (" + format_measure(m.bound) +
                        ") does not bound the criterion series for " + f.spec());
      continue;
    }
    const std::size_t start = eventual_start(ex.convergents, m.bound);
    mpz_class from_q = start < ex.convergents.size() ? ex.convergents[start].q : mpz_class(2);
    if (ex.convergents.empty()) from_q = 2;
    const auto tail = measure_tail_bound(m.bound.mu, m.bound.c, f, from_q);
    if (!tail) continue;
    v.outcome = Outcome::Converges;
    v.certificate = CertificateKind::CriterionBounded;
    v.tail_source = m.kind;
    v.measure = m.bound;
    v.tail_from_q = from_q;
    v.tail_bound = *tail;
    return v;
  }

  if (source.kind() == SourceKind::Liouville && f.kind() == FKind::Power) {
    const auto& spec = std::get<LiouvilleSpec>(source.params());
    const double p = f.exponent();
    if (spec.schedule == ExponentSchedule::Tower100 || p < 1.0) {
      v.outcome = Outcome::Diverges;
      v.certificate = CertificateKind::LiouvilleFamily;
      v.notes.push_back("the partial sums lambda_N are eventually convergents with even denominator "
                        "and q_{n+1} grows fast enough that the criterion terms are unbounded");
      return v;
    }
    v.notes.push_back("factorial exponents do not force divergence at p = 1; the tower schedule does");
  }

  v.outcome = Outcome::Inconclusive;
  v.certificate = CertificateKind::Evidence;
  return v;
}

}  // namespace dseries
