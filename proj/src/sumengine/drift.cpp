#include <cmath>
#include <numbers>

#include "dseries/errors.hpp"
#include "dseries/sumengine.hpp"

namespace dseries {

DriftPrediction drift_predict(const mpz_class& a, const mpz_class& q, const FDescriptor& f,
                              std::uint64_t n, std::uint64_t m) {
  if (q <= 0) throw InvalidArgument("denominator must be positive");
  if (mpz_odd_p(q.get_mpz_t())) {
    throw InvalidArgument("q = " + q.get_str() + " is odd: the partial sums stay bounded, no drift");
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t());
  if (g != 1) throw InvalidArgument("a and q must be coprime");
  if (n % 2 != 0) throw InvalidArgument("N must be even");
  if (m == 0) throw InvalidArgument("M must be at least 1");

  const double qd = q.get_d();
  const double lower = std::max<double>(static_cast<double>(n), 1.0);
  DriftPrediction d;
  d.magnitude = std::tan(std::numbers::pi / (2 * qd)) / qd *
                f.integral(lower, static_cast<double>(n) + static_cast<double>(m));
  // Summing (-1)^j |sin(pi a j / q)| over one period gives -tan(pi / 2q), hence the sign.
  d.sign = (n % 2 == 0) ? -1 : 1;
  d.error_allowance = kDriftAllowanceFactor * qd * f(lower);
  return d;
}

}  // namespace dseries
