#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dseries {

enum class FKind { Power, LogReciprocal, Custom };

struct FFlags {
  bool decreasing = true;
  bool limit_zero = true;
  bool integral_divergent = true;
};

/// A weight f in the class of continuous decreasing functions on [1, inf)
/// tending to 0 with divergent integral, together with its antiderivative F
/// normalized so that F(1) = 0.
class FDescriptor {
 public:
  /// f(x) = x^-p, 0 < p <= 1.
  static FDescriptor power(double p);
  /// f(x) = 1 / (x (1 + ln x)), F(x) = ln(1 + ln x).
  static FDescriptor log_reciprocal();
  /// Arbitrary descriptor; nothing is checked until validate_f().
  static FDescriptor custom(std::string name, std::function<double(double)> f,
                            std::function<double(double)> antiderivative, FFlags flags = {});

  FKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Exponent p for power weights, 0 otherwise.
  double exponent() const { return p_; }
  const FFlags& flags() const { return flags_; }

  double operator()(double x) const;
  double antiderivative(double x) const;
  /// F(b) - F(a), computed without cancellation for the built-in kinds.
  double integral(double a, double b) const;
  /// ln F(X) given ln X, valid for X far beyond double range; nullopt for custom weights.
  std::optional<double> log_antiderivative(double log_x) const;

  /// Textual form used by the command line: "pow:p" or "logrec".
  std::string spec() const;

 private:
  FKind kind_ = FKind::Power;
  std::string name_;
  double p_ = 1.0;
  FFlags flags_;
  std::function<double(double)> f_;
  std::function<double(double)> F_;
};

/// Parses "pow:<p>" or "logrec".
FDescriptor parse_f_spec(const std::string& text);

struct SamplingGrid {
  double x_max = 1e6;
  int points = 400;  // log-spaced over [1, x_max]
};

struct Violation {
  std::string check;
  double x = 0;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Checks positivity, monotonicity, F' = f (central differences, relative
/// tolerance 1e-6) and consistency of the divergence flag on a sampling grid.
ValidationReport validate_f(const FDescriptor& f, const SamplingGrid& grid = {});

}  // namespace dseries
