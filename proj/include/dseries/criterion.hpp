#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "dseries/cfrac.hpp"
#include "dseries/fdescriptor.hpp"
#include "dseries/realsource.hpp"

namespace dseries {

/// (1/q_n^2) * integral_1^{q_{n+1}} f, for one q_n in Q_alpha.
struct CriterionTerm {
  std::uint32_t index = 0;
  mpz_class q;
  mpz_class q_next;
  /// +inf when the term exceeds double range; log10_value is always finite.
  double value = 0;
  double log10_value = 0;
  double rel_error = 0;
  double running_sum = 0;
  double running_log10 = 0;
};

struct CriterionSum {
  std::vector<CriterionTerm> terms;
  double sum = 0;
  double log10_sum = -std::numeric_limits<double>::infinity();
  /// True when some term or the sum is beyond double range.
  bool overflow = false;
};

/// Evaluates the criterion series over the given Q_alpha entries through the
/// antiderivative. Denominators beyond double range go through log space for
/// the built-in weights; custom weights throw RangeError there.
CriterionSum criterion_partial_sum(const std::vector<QAlphaEntry>& entries, const FDescriptor& f);

/// log10 of the criterion term for (q, q_next) given only log10 of each,
/// usable when the denominators are astronomically large.
std::optional<double> criterion_term_log10(double log10_q, double log10_q_next,
                                           const FDescriptor& f);

enum class Outcome { Converges, Diverges, Inconclusive };

enum class CertificateKind {
  RationalOddQ,
  RationalEvenQ,
  CriterionBounded,
  IrrationalityMeasure,
  RothAlgebraic,
  MahlerPi,
  LiouvilleFamily,
  QAlphaEmptyStructural,
  Evidence,
};

std::string to_string(Outcome outcome);
std::string to_string(CertificateKind kind);

/// Bound q_{n+1} <= C q_n^{mu - 1} on convergent denominators, for all large n.
struct MeasureBound {
  double mu = 0;
  double c = 1;
};

namespace cert {
/// Roth: q_{n+1} <= q_n^{3/2} eventually, i.e. mu = 5/2, C = 1. Algebraic sources only.
struct RothAlgebraic {};
/// Mahler: |pi - a/q| >= q^-42 gives q_{n+1} <= C q_n^{41}. pi and 1/pi only.
struct MahlerPi {
  double c = 10;
};
/// A user-supplied irrationality-measure bound.
struct Measure {
  MeasureBound bound;
};
/// The user asserts every partial quotient from `from_index` on equals 1.
struct AllOnesTail {
  std::size_t from_index = 1;
};
}  // namespace cert

using CertificateInput =
    std::variant<cert::RothAlgebraic, cert::MahlerPi, cert::Measure, cert::AllOnesTail>;

struct Budget {
  std::size_t max_convergents = 40;
  std::int64_t max_bits = 0;  // 0: use the source's own cap
};

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  CertificateKind certificate = CertificateKind::Evidence;
  /// Which certificate bounded the criterion tail (CriterionBounded only).
  std::optional<CertificateKind> tail_source;
  std::optional<MeasureBound> measure;
  /// Criterion terms from q_n below this bound are summed explicitly; the rest is
  /// covered by tail_bound.
  std::optional<mpz_class> tail_from_q;
  std::optional<double> tail_bound;
  mpz_class reduced_a = 0, reduced_q = 0;  // rational sources
  std::string f_spec;
  std::string alpha;
  CriterionSum evidence;
  std::size_t convergents_examined = 0;
  ExpandStatus expansion_status = ExpandStatus::Complete;
  std::vector<std::string> notes;
};

/// Upper bound on the criterion tail over q_n >= from_q for f = x^-p, given
/// q_{n+1} <= C q_n^{mu-1} there; nullopt when (mu - 1)(1 - p) >= 2.
std::optional<double> measure_tail_bound(double mu, double c, double p, const mpz_class& from_q);
/// Same for a general weight, using integral_1^Q f <= f(1) Q; needs mu < 3.
std::optional<double> measure_tail_bound(double mu, double c, const FDescriptor& f,
                                         const mpz_class& from_q);

/// Decides convergence of sum (-1)^n f(n) |sin(n pi alpha)|.
///
/// Rational alpha is decided exactly by the parity of the reduced denominator.
/// Irrational alpha is decided only with structural knowledge or a
/// certificate; otherwise the verdict is Inconclusive and carries the
/// criterion partial sums as evidence. Throws InvalidArgument when a
/// certificate does not apply to the source.
Verdict classify(const RealSource& source, const FDescriptor& f, const Budget& budget = {},
                 const std::vector<CertificateInput>& certs = {});

}  // namespace dseries
