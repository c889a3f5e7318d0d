#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dseries/fdescriptor.hpp"
#include "dseries/realsource.hpp"

namespace dseries {

enum class SumMode { Direct, PeriodicRational };
std::string to_string(SumMode mode);

/// S(alpha; M, N) = sum_{n=N+1}^{N+M} (-1)^n f(n) |sin(n pi alpha)|.
struct PartialSumResult {
  double value = 0;
  double rounding_bound = 0;
  std::uint64_t terms = 0;
  SumMode mode = SumMode::Direct;
};

/// Running sum after the first `m` terms.
struct TracePoint {
  std::uint64_t m = 0;
  double value = 0;
  double rounding_bound = 0;
};

inline constexpr std::uint64_t kDefaultMaxTerms = 1'000'000'000;

struct SumOptions {
  unsigned workers = 1;
  std::uint64_t max_terms = kDefaultMaxTerms;
  /// Record the running sum at these term counts (each in [1, M]). Ignored in reverse order.
  std::vector<std::uint64_t> checkpoints;
  /// Sum from the last term backwards in a single sequential pass (for cross-checks).
  bool reverse = false;
};

/// ceil(M 2^-j) for j = 0, 1, ... down to 1, in increasing order without repeats.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t m);

/// Term-by-term evaluation. Each frac(n alpha) comes from one 128-bit
/// fixed-point image of alpha; blocks of terms are summed with Sum2 and
/// combined in a fixed order, so the result does not depend on `workers`.
PartialSumResult partial_sum_direct(const RealSource& source, const FDescriptor& f,
                                    std::uint64_t n, std::uint64_t m,
                                    const SumOptions& options = {},
                                    std::vector<TracePoint>* trace = nullptr);

/// Same sum for alpha = a/q, grouping terms by n mod q (gcd(a, q) = 1).
PartialSumResult partial_sum_periodic(const mpz_class& a, const mpz_class& q, const FDescriptor& f,
                                      std::uint64_t n, std::uint64_t m,
                                      const SumOptions& options = {},
                                      std::vector<TracePoint>* trace = nullptr);

struct RunningMax {
  double max_abs = 0;
  std::uint64_t at_m = 0;
  double rounding_bound = 0;
};

/// max over 1 <= M' <= M of |S(a/q; M', N)|.
RunningMax max_abs_running_sum(const mpz_class& a, const mpz_class& q, const FDescriptor& f,
                               std::uint64_t n, std::uint64_t m);

/// Predicted drift of S(a/q; M, N) for even q: sign * magnitude, within error_allowance.
struct DriftPrediction {
  double magnitude = 0;
  int sign = -1;
  double error_allowance = 0;
  double value() const { return sign * magnitude; }
};

inline constexpr double kDriftAllowanceFactor = 4.0;

DriftPrediction drift_predict(const mpz_class& a, const mpz_class& q, const FDescriptor& f,
                              std::uint64_t n, std::uint64_t m);

// Numeric kernels behind the proofs.

struct BoundedValue {
  double value = 0;
  double error_bound = 0;
};

/// Truncated cosine series of |sin(pi x)| with K terms; error_bound covers the
/// discarded tail 2/(pi (2K + 1)) and rounding.
BoundedValue fourier_abs_sin(double x, std::uint64_t k);

struct GeometricSum {
  std::complex<double> value;
  double bound = 0;  // min(N, 1 / (2 ||alpha||))
  bool within_bound = false;
};

/// sum_{n=0}^{N-1} e(n alpha) with e(x) = exp(2 pi i x), by the closed form.
GeometricSum geometric_sum(double alpha, std::uint64_t n);

struct OscIntegral {
  double value = 0;
  double error_bound = 0;  // quadrature estimate plus analytic tail remainder
  double lemma_bound = 0;  // 2 nu^-p
  bool within_bound = false;
};

/// integral_nu^mu t^-p cos t dt for 0 < p < 1; mu may be +infinity.
OscIntegral osc_integral(double p, double nu, double mu);

struct APConstant {
  double closed_form = 0;
  double quadrature = 0;
  double quadrature_error = 0;
  double near_zero_bound = 0;  // crude bound nu0^{1-p}/(1-p) on the piece next to 0
  bool exceeds_lower_bound = false;  // closed_form > p / (1 - p)
};

/// integral_0^inf t^-p cos t dt = Gamma(1 - p) sin(pi p / 2), both by formula and by quadrature.
APConstant a_p_constant(double p);

struct BoundCheck {
  double sum = 0;
  double bound = 0;
  double rounding = 0;
  bool holds = false;
};

/// sum of 1/(k^2 - 1) over q <= k <= r with k = q (mod 2q), against 2/q^2.
BoundCheck progression_sum_bound_check(std::uint64_t q, std::uint64_t r);

/// |sum_{X <= n <= Y} (-1)^n f(n)| against f(X).
BoundCheck alternating_tail_check(const FDescriptor& f, double x, double y);

}  // namespace dseries
