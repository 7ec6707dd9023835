#pragma once

#include <complex>
#include <limits>
#include <span>

namespace fockgabor {

using Complex = std::complex<double>;
using ComplexPoint = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Maps an angle to (-pi, pi].
double normalize_phase(double phase);

// e^{i phase}, exact at multiples of pi/2.
Complex unit_phasor(double phase);

// Throws DomainError unless both coordinates are finite.
void require_finite(ComplexPoint z, const char* what);

// A complex number stored as (log|w|, arg w). log_mag == -inf is the exact
// zero; the phase of zero is 0.
class LogComplex {
 public:
  constexpr LogComplex() = default;

  static LogComplex zero() { return {}; }
  static LogComplex one() { return from_polar(0.0, 0.0); }
  static LogComplex from_polar(double log_mag, double phase);
  static LogComplex from_complex(Complex w);
  // exp(w) for a complex logarithm w.
  static LogComplex from_log(Complex w);

  double log_mag() const { return log_mag_; }
  double phase() const { return phase_; }
  bool is_zero() const { return log_mag_ == -std::numeric_limits<double>::infinity(); }

  double abs() const;
  Complex to_complex() const;
  // The value multiplied by e^{-log_scale}; stays finite when log_scale
  // tracks the magnitude.
  Complex to_complex_scaled(double log_scale) const;

  LogComplex conj() const { return is_zero() ? *this : from_polar(log_mag_, -phase_); }
  // Multiplies by e^{delta}, delta real.
  LogComplex scaled(double delta) const;

  friend LogComplex operator*(const LogComplex& a, const LogComplex& b);
  // Throws DomainError when b is the exact zero.
  friend LogComplex operator/(const LogComplex& a, const LogComplex& b);

 private:
  double log_mag_ = -std::numeric_limits<double>::infinity();
  double phase_ = 0.0;
};

enum class CombineOp { product, quotient };

// Product of all values, or values[0] / (values[1] * ... * values[n-1]).
LogComplex log_combine(std::span<const LogComplex> values, CombineOp op);

// Sum computed after rescaling by the largest magnitude.
LogComplex log_sum(std::span<const LogComplex> values);

}  // namespace fockgabor
