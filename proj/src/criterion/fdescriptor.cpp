#include "dseries/fdescriptor.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "dseries/errors.hpp"

namespace dseries {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

FDescriptor FDescriptor::power(double p) {
  if (!(p > 0.0) || !(p <= 1.0)) {
    if (p > 1.0) {
      throw InvalidArgument("p = " + shortest(p) +
                            " > 1: the series converges absolutely by comparison with sum n^-p");
    }
    throw InvalidArgument("power weight needs 0 < p <= 1");
  }
  FDescriptor f;
  f.kind_ = FKind::Power;
  f.p_ = p;
  f.name_ = "x^-" + shortest(p);
  return f;
}

FDescriptor FDescriptor::log_reciprocal() {
  FDescriptor f;
  f.kind_ = FKind::LogReciprocal;
  f.p_ = 0;
  f.name_ = "1/(x(1+ln x))";
  return f;
}

FDescriptor FDescriptor::custom(std::string name, std::function<double(double)> fn,
                                std::function<double(double)> antiderivative, FFlags flags) {
  FDescriptor f;
  f.kind_ = FKind::Custom;
  f.p_ = 0;
  f.name_ = std::move(name);
  f.flags_ = flags;
  f.f_ = std::move(fn);
  f.F_ = std::move(antiderivative);
  return f;
}

double FDescriptor::operator()(double x) const {
  switch (kind_) {
    case FKind::Power: return p_ == 1.0 ? 1.0 / x : std::pow(x, -p_);
    case FKind::LogReciprocal: return 1.0 / (x * (1.0 + std::log(x)));
    case FKind::Custom: return f_(x);
  }
  return 0;
}

double FDescriptor::antiderivative(double x) const {
  switch (kind_) {
    case FKind::Power:
      if (p_ == 1.0) return std::log(x);
      return std::expm1((1.0 - p_) * std::log(x)) / (1.0 - p_);
    case FKind::LogReciprocal: return std::log1p(std::log(x));
    case FKind::Custom: return F_(x);
  }
  return 0;
}

double FDescriptor::integral(double a, double b) const {
  switch (kind_) {
    case FKind::Power: {
      const double log_ratio = std::log1p((b - a) / a);
      if (p_ == 1.0) return log_ratio;
      return std::pow(a, 1.0 - p_) * std::expm1((1.0 - p_) * log_ratio) / (1.0 - p_);
    }
    case FKind::LogReciprocal: {
      const double la = std::log(a);
      return std::log1p(std::log1p((b - a) / a) / (1.0 + la));
    }
    case FKind::Custom: return F_(b) - F_(a);
  }
  return 0;
}

std::optional<double> FDescriptor::log_antiderivative(double log_x) const {
  switch (kind_) {
    case FKind::Power: {
      if (p_ == 1.0) return std::log(log_x);
      const double t = (1.0 - p_) * log_x;
      if (t < 700.0) return std::log(std::expm1(t) / (1.0 - p_));
      return t - std::log(1.0 - p_) + std::log1p(-std::exp(-t));
    }
    case FKind::LogReciprocal: return std::log(std::log1p(log_x));
    case FKind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

std::string FDescriptor::spec() const {
  switch (kind_) {
    case FKind::Power: return "pow:" + shortest(p_);
    case FKind::LogReciprocal: return "logrec";
    case FKind::Custom: return "custom:" + name_;
  }
  return "?";
}

FDescriptor parse_f_spec(const std::string& text) {
  if (text == "logrec") return FDescriptor::log_reciprocal();
  if (text.rfind("pow:", 0) == 0) {
    const std::string num = text.substr(4);
    double p = 0;
    auto res = std::from_chars(num.data(), num.data() + num.size(), p);
    if (num.empty() || res.ec != std::errc() || res.ptr != num.data() + num.size()) {
      throw InvalidArgument("cannot parse exponent in weight spec '" + text + "'");
    }
    return FDescriptor::power(p);
  }
  throw InvalidArgument("unknown weight spec '" + text + "' (expected pow:<p> or logrec)");
}

ValidationReport validate_f(const FDescriptor& f, const SamplingGrid& grid) {
  ValidationReport report;
  auto fail = [&](std::string check, double x, std::string detail) {
    report.ok = false;
    report.violations.push_back(Violation{std::move(check), x, std::move(detail)});
  };
  if (grid.points < 2 || !(grid.x_max > 1.0)) {
    fail("grid", 0, "grid must have at least two points over [1, x_max] with x_max > 1");
    return report;
  }
  const double log_max = std::log(grid.x_max);
  double prev_f = 0, prev_F = 0;
  for (int i = 0; i < grid.points; ++i) {
    const double x = std::exp(log_max * i / (grid.points - 1));
    const double fx = f(x);
    const double Fx = f.antiderivative(x);
    if (!(fx > 0) || !std::isfinite(fx)) fail("positivity", x, "f(x) = " + std::to_string(fx));
    if (i > 0 && fx > prev_f) fail("monotonicity", x, "f increases on the grid");
    if (i > 0 && Fx < prev_F) fail("antiderivative_monotonicity", x, "F decreases on the grid");
    const double xc = std::max(x, 1.001);
    const double h = 1e-4 * xc;
    const double deriv = (f.antiderivative(xc + h) - f.antiderivative(xc - h)) / (2 * h);
    const double fxc = f(xc);
    if (!(std::abs(deriv - fxc) <= 1e-6 * std::abs(fxc))) {
      fail("derivative", xc,
           "(F(x+h) - F(x-h))/2h = " + std::to_string(deriv) + " vs f(x) = " + std::to_string(fxc));
    }
    prev_f = fx;
    prev_F = Fx;
  }
  if (std::abs(f.antiderivative(1.0)) > 1e-12) fail("normalization", 1.0, "F(1) != 0");
  if (f.flags().integral_divergent) {
    const double total = f.antiderivative(grid.x_max) - f.antiderivative(1.0);
    const double last_decade = f.antiderivative(grid.x_max) - f.antiderivative(grid.x_max / 10);
    if (!(total > 0) || !(last_decade / total >= 1e-3)) {
      fail("divergence", grid.x_max,
           "F has levelled off although the integral is flagged divergent");
    }
  }
  return report;
}

}  // namespace dseries
