#include "fockgabor/log_complex.hpp"

#include <cmath>
#include <string>

#include "fockgabor/errors.hpp"

namespace fockgabor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier-compensated accumulator for one real component.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

double normalize_phase(double phase) {
  if (phase > -kPi && phase <= kPi) return phase;
  double r = std::remainder(phase, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Complex unit_phasor(double phase) {
  if (phase == 0.0) return {1.0, 0.0};
  if (phase == kPi || phase == -kPi) return {-1.0, 0.0};
  if (phase == kPi / 2) return {0.0, 1.0};
  if (phase == -kPi / 2) return {0.0, -1.0};
  return {std::cos(phase), std::sin(phase)};
}

void require_finite(ComplexPoint z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError(std::string(what) + ": non-finite complex point");
  }
}

LogComplex LogComplex::from_polar(double log_mag, double phase) {
  LogComplex r;
  if (std::isnan(log_mag) || std::isnan(phase) || log_mag == kInf) {
    throw DomainError("LogComplex: non-finite magnitude or phase");
  }
  if (log_mag == -kInf) return r;
  if (!std::isfinite(phase)) throw DomainError("LogComplex: non-finite phase");
  r.log_mag_ = log_mag;
  r.phase_ = normalize_phase(phase);
  return r;
}

LogComplex LogComplex::from_complex(Complex w) {
  require_finite(w, "LogComplex::from_complex");
  if (w == Complex{0.0, 0.0}) return {};
  return from_polar(std::log(std::abs(w)), std::arg(w));
}

LogComplex LogComplex::from_log(Complex w) {
  if (w.real() == -kInf) return {};
  return from_polar(w.real(), w.imag());
}

double LogComplex::abs() const { return is_zero() ? 0.0 : std::exp(log_mag_); }

Complex LogComplex::to_complex() const {
  if (is_zero()) return {0.0, 0.0};
  return std::exp(log_mag_) * unit_phasor(phase_);
}

Complex LogComplex::to_complex_scaled(double log_scale) const {
  if (is_zero()) return {0.0, 0.0};
  return std::exp(log_mag_ - log_scale) * unit_phasor(phase_);
}

LogComplex LogComplex::scaled(double delta) const {
  if (is_zero()) return *this;
  return from_polar(log_mag_ + delta, phase_);
}

LogComplex operator*(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return LogComplex::from_polar(a.log_mag_ + b.log_mag_, a.phase_ + b.phase_);
}

LogComplex operator/(const LogComplex& a, const LogComplex& b) {
  if (b.is_zero()) throw DomainError("LogComplex: division by exact zero");
  if (a.is_zero()) return {};
  return LogComplex::from_polar(a.log_mag_ - b.log_mag_, a.phase_ - b.phase_);
}

LogComplex log_combine(std::span<const LogComplex> values, CombineOp op) {
  double log_mag = 0.0;
  double phase = 0.0;
  bool zero = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const LogComplex& v = values[i];
    const bool denominator = op == CombineOp::quotient && i > 0;
    if (v.is_zero()) {
      if (denominator) {
        throw DomainError("log_combine: quotient by exact zero at factor " + std::to_string(i));
      }
      zero = true;
      continue;
    }
    if (denominator) {
      log_mag -= v.log_mag();
      phase -= v.phase();
    } else {
      log_mag += v.log_mag();
      phase += v.phase();
    }
  }
  if (zero) return {};
  return LogComplex::from_polar(log_mag, phase);
}

LogComplex log_sum(std::span<const LogComplex> values) {
  double top = -kInf;
  for (const LogComplex& v : values) top = std::max(top, v.log_mag());
  if (top == -kInf) return {};
  Compensated re;
  Compensated im;
  for (const LogComplex& v : values) {
    const Complex w = v.to_complex_scaled(top);
    re.add(w.real());
    im.add(w.imag());
  }
  const Complex s{re.value(), im.value()};
  if (s == Complex{0.0, 0.0}) return {};
  return LogComplex::from_polar(top + std::log(std::abs(s)), std::arg(s));
}

}  // namespace fockgabor
