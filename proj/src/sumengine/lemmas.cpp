#include <cmath>
#include <numbers>

#include "dseries/compensated.hpp"
#include "dseries/errors.hpp"
#include "dseries/sumengine.hpp"

namespace dseries {

using std::numbers::pi;

BoundedValue fourier_abs_sin(double x, std::uint64_t k) {
  if (k == 0) throw InvalidArgument("K must be at least 1");
  const double xr = x - std::floor(x);
  CompensatedSum s;
  double rounding = 0;
  for (std::uint64_t j = 1; j <= k; ++j) {
    const double jd = static_cast<double>(j);
    const double t = jd * xr;
    const double arg = t - std::floor(t);
    const double denom = 4 * jd * jd - 1;
    s.add(std::cos(2 * pi * arg) / denom);
    // Error in j * x (relative u) moves the angle by up to 2 pi j u; cos and division add a few ulps.
    rounding += (2 * pi * jd * kUnitRoundoff + 4 * kUnitRoundoff) / denom;
  }
  BoundedValue out;
  out.value = 2 / pi - 4 / pi * s.value();
  const double tail = 2 / (pi * (2 * static_cast<double>(k) + 1));
  out.error_bound = tail + 4 / pi * (rounding + s.error_bound()) + 4 * kUnitRoundoff;
  return out;
}

GeometricSum geometric_sum(double alpha, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("N must be at least 1");
  const double frac = alpha - std::floor(alpha);
  const double dist = std::min(frac, 1 - frac);
  if (!(dist > 0)) throw InvalidArgument("alpha must not be an integer");
  const double nd = static_cast<double>(n);
  // sum_{j<N} e(j alpha) = e((N - 1) alpha / 2) sin(pi N alpha) / sin(pi alpha)
  const double na = std::fmod(nd * frac, 2.0);
  const double amplitude = std::sin(pi * na) / std::sin(pi * frac);
  const double phase = std::fmod((nd - 1) * frac, 2.0) * pi;
  GeometricSum g;
  g.value = std::polar(1.0, phase) * amplitude;
  g.bound = std::min(nd, 1 / (2 * dist));
  g.within_bound = std::abs(g.value) <= g.bound * (1 + 1e-12) + 1e-12;
  return g;
}

BoundCheck progression_sum_bound_check(std::uint64_t q, std::uint64_t r) {
  if (q < 3 || r < q) throw InvalidArgument("need 3 <= q <= r");
  CompensatedSum s;
  for (std::uint64_t k = q; k <= r; k += 2 * q) {
    const double kd = static_cast<double>(k);
    s.add(1 / ((kd - 1) * (kd + 1)));
    if (r - k < 2 * q) break;
  }
  BoundCheck c;
  c.sum = s.value();
  c.bound = 2 / (static_cast<double>(q) * static_cast<double>(q));
  c.rounding = s.error_bound() + 4 * kUnitRoundoff * s.abs_sum();
  c.holds = c.sum < c.bound + c.rounding;
  return c;
}

BoundCheck alternating_tail_check(const FDescriptor& f, double x, double y) {
  if (!(x >= 1) || !(y >= x)) throw InvalidArgument("need 1 <= X <= Y");
  CompensatedSum s;
  const auto first = static_cast<std::uint64_t>(std::ceil(x));
  const auto last = static_cast<std::uint64_t>(std::floor(y));
  for (std::uint64_t k = first; k <= last; ++k) {
    const double v = f(static_cast<double>(k));
    s.add((k & 1) ? -v : v);
  }
  BoundCheck c;
  c.sum = std::abs(s.value());
  c.bound = f(x);
  c.rounding = s.error_bound() + 4 * kUnitRoundoff * s.abs_sum();
  c.holds = c.sum <= c.bound + c.rounding;
  return c;
}

}  // namespace dseries
