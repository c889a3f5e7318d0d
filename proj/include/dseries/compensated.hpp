#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace dseries {

inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

/// gamma_n = n u / (1 - n u), the usual bound for n floating-point operations.
inline double gamma_n(double n) {
  const double nu = n * kUnitRoundoff;
  return nu < 0.5 ? nu / (1 - nu) : std::numeric_limits<double>::infinity();
}

/// Error-free transformation: a + b = s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

/// Cascaded summation with TwoSum (Sum2). The result satisfies
/// |value() - exact| <= u |value()| + gamma_n^2 sum |x_i|, which error_bound() reports
/// with a small safety factor.
class CompensatedSum {
 public:
  void add(double x) {
    double e;
    two_sum(sigma_, x, sigma_, e);
    err_ += e;
    abs_ += std::abs(x);
    ++count_;
  }
  double value() const { return sigma_ + err_; }
  double sigma() const { return sigma_; }
  double err() const { return err_; }
  double abs_sum() const { return abs_; }
  std::uint64_t count() const { return count_; }
  /// Part of the bound not involving the final rounding: gamma_n^2 sum |x_i|.
  double cascade_bound() const {
    const double g = gamma_n(static_cast<double>(count_) + 1);
    return g * g * abs_ * (1 + 1e-6);
  }
  double error_bound() const {
    return 2 * kUnitRoundoff * std::abs(value()) + cascade_bound();
  }

 private:
  double sigma_ = 0;
  double err_ = 0;
  double abs_ = 0;
  std::uint64_t count_ = 0;
};

}  // namespace dseries
