#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "dseries/compensated.hpp"
#include "dseries/errors.hpp"
#include "dseries/sumengine.hpp"

namespace dseries {

namespace {

using std::numbers::pi;

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kTolerance = 1e-9;
constexpr double kMaxPanel = pi / 4;
constexpr int kMaxDepth = 60;
constexpr double kTruncation = 1e4;

struct Estimate {
  double value;
  double error;
};

Estimate kronrod(const std::function<double(double)>& g, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double fc = g(mid);
  double k = kKronrodWeights[7] * fc;
  double gs = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = g(mid - dx) + g(mid + dx);
    k += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gs += kGaussWeights[i / 2] * pair;
  }
  return {k * half, std::abs((k - gs) * half)};
}

void adaptive(const std::function<double(double)>& g, double a, double b, double tol, int depth,
              CompensatedSum& sum, double& error) {
  const Estimate e = kronrod(g, a, b);
  if (e.error <= tol || e.error <= 64 * kUnitRoundoff * std::abs(e.value)) {
    sum.add(e.value);
    error += e.error;
    return;
  }
  if (depth >= kMaxDepth) {
    throw RangeError("quadrature did not reach the tolerance on [" + std::to_string(a) + ", " +
                     std::to_string(b) + "]");
  }
  const double mid = 0.5 * (a + b);
  adaptive(g, a, mid, tol / 2, depth + 1, sum, error);
  adaptive(g, mid, b, tol / 2, depth + 1, sum, error);
}

// integral_a^b t^-p cos t on panels no wider than pi/4.
Estimate integrate_panels(double p, double a, double b) {
  if (!(b > a)) return {0, 0};
  const std::function<double(double)> g = [p](double t) { return std::pow(t, -p) * std::cos(t); };
  const auto panels = static_cast<std::uint64_t>(std::ceil((b - a) / kMaxPanel));
  const double width = (b - a) / static_cast<double>(panels);
  const double tol = kTolerance / static_cast<double>(panels);
  CompensatedSum sum;
  double error = 0;
  for (std::uint64_t i = 0; i < panels; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = i + 1 == panels ? b : lo + width;
    adaptive(g, lo, hi, tol, 0, sum, error);
  }
  return {sum.value(), error + sum.error_bound()};
}

void check_exponent(double p) {
  if (!(p > 0) || !(p < 1)) throw InvalidArgument("p must lie strictly between 0 and 1");
}

}  // namespace

OscIntegral osc_integral(double p, double nu, double mu) {
  check_exponent(p);
  if (!(nu > 0) || !(mu >= nu)) throw InvalidArgument("need 0 < nu <= mu");
  OscIntegral out;
  out.lemma_bound = 2 * std::pow(nu, -p);
  if (std::isinf(mu)) {
    const double t = std::max(kTruncation, 2 * nu);
    const Estimate body = integrate_panels(p, nu, t);
    // Three integrations by parts on [T, inf); the remainder is at most p (p + 1) T^{-p-2}.
    const double tail = -std::pow(t, -p) * std::sin(t) + p * std::pow(t, -p - 1) * std::cos(t) +
                        p * (p + 1) * std::pow(t, -p - 2) * std::sin(t);
    out.value = body.value + tail;
    out.error_bound = body.error + p * (p + 1) * std::pow(t, -p - 2) + 8 * kUnitRoundoff;
  } else {
    const Estimate body = integrate_panels(p, nu, mu);
    out.value = body.value;
    out.error_bound = body.error;
  }
  out.within_bound = std::abs(out.value) <= out.lemma_bound + out.error_bound;
  return out;
}

APConstant a_p_constant(double p) {
  check_exponent(p);
  APConstant out;
  out.closed_form = std::tgamma(1 - p) * std::sin(pi * p / 2);
  out.exceeds_lower_bound = out.closed_form > p / (1 - p);

  // Piece next to 0 from the cosine series; the series alternates with
  // decreasing terms, so the first omitted term bounds the remainder.
  constexpr double kSplit = 0.5;
  double near = 0, remainder = 0, factorial = 1;
  for (int k = 0; k < 40; ++k) {
    if (k > 0) factorial *= (2.0 * k - 1) * (2.0 * k);
    const double term = std::pow(kSplit, 2 * k + 1 - p) / (factorial * (2 * k + 1 - p));
    if (term < 1e-18) {
      remainder = term;
      break;
    }
    near += (k % 2 == 0) ? term : -term;
  }
  out.near_zero_bound = std::pow(kSplit, 1 - p) / (1 - p);
  const OscIntegral far = osc_integral(p, kSplit, std::numeric_limits<double>::infinity());
  out.quadrature = near + far.value;
  out.quadrature_error = far.error_bound + remainder + 8 * kUnitRoundoff;
  return out;
}

}  // namespace dseries
