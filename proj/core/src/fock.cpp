#include "fockgabor/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fockgabor/errors.hpp"
#include "fockgabor/weierstrass.hpp"

namespace fockgabor::fock {

namespace {

constexpr double kFourthRootTwo = 1.18920711500272106672;

std::string point_label(ComplexPoint z) {
  std::ostringstream os;
  os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
  return os.str();
}

bool pure_kernels(const FockFunction& f) {
  return f.decomposition() && f.decomposition()->sigma3_coefficient == Complex{0.0, 0.0};
}

// <f, sigma_3> when f carries a decomposition.
Complex against_sigma3(const KernelDecomposition& d) {
  Complex acc{0.0, 0.0};
  for (const KernelTerm& t : d.terms) {
    acc += t.coefficient * std::conj(sigma::sigma3_weighted(t.center).to_complex());
  }
  if (d.sigma3_coefficient != Complex{0.0, 0.0}) acc += d.sigma3_coefficient * sigma3_norm_squared();
  return acc;
}

}  // namespace

double KernelSpec::log_norm() const { return kPi * std::norm(center) / 2.0; }

LogComplex kernel_weighted_eval(const KernelSpec& kernel, ComplexPoint z) {
  const ComplexPoint c = kernel.center;
  double log_mag = -kPi * std::norm(z - c) / 2.0;
  if (!kernel.normalized) log_mag += kernel.log_norm();
  const double phase = kPi * (std::conj(c) * z).imag();
  return LogComplex::from_polar(log_mag, phase);
}

FockFunction::FockFunction(std::string label, Evaluator weighted, std::optional<KernelDecomposition> decomposition,
                           std::vector<ComplexPoint> known_zeros)
    : impl_(std::make_shared<const Impl>(
          Impl{std::move(label), std::move(weighted), std::move(decomposition), std::move(known_zeros)})) {
  if (!impl_->weighted) throw DomainError("FockFunction: empty evaluator");
}

LogComplex evaluate_decomposition(const KernelDecomposition& decomposition, ComplexPoint z) {
  std::vector<LogComplex> parts;
  parts.reserve(decomposition.terms.size() + 1);
  for (const KernelTerm& t : decomposition.terms) {
    if (t.coefficient == Complex{0.0, 0.0}) continue;
    parts.push_back(LogComplex::from_complex(t.coefficient) * kernel_weighted_eval({t.center, true}, z));
  }
  if (decomposition.sigma3_coefficient != Complex{0.0, 0.0}) {
    parts.push_back(LogComplex::from_complex(decomposition.sigma3_coefficient) * sigma::sigma3_weighted(z));
  }
  return log_sum(parts);
}

FockFunction kernel_function(const KernelSpec& kernel) {
  KernelDecomposition d;
  const Complex coefficient = kernel.normalized ? Complex{1.0, 0.0} : Complex{std::exp(kernel.log_norm()), 0.0};
  d.terms.push_back({coefficient, kernel.center});
  const std::string label = std::string(kernel.normalized ? "normalized_kernel" : "kernel") + point_label(kernel.center);
  return FockFunction(
      label, [kernel](ComplexPoint z) { return kernel_weighted_eval(kernel, z); }, std::move(d));
}

FockFunction sigma3_function() {
  KernelDecomposition d;
  d.sigma3_coefficient = {1.0, 0.0};
  return FockFunction("sigma3", [](ComplexPoint z) { return sigma::sigma3_weighted(z); }, std::move(d));
}

FockFunction from_decomposition(std::string label, KernelDecomposition decomposition) {
  auto shared = std::make_shared<const KernelDecomposition>(decomposition);
  return FockFunction(
      std::move(label), [shared](ComplexPoint z) { return evaluate_decomposition(*shared, z); },
      std::move(decomposition));
}

FockFunction linear_combination(std::string label, const std::vector<std::pair<Complex, FockFunction>>& parts) {
  std::optional<KernelDecomposition> merged = KernelDecomposition{};
  for (const auto& [c, f] : parts) {
    if (!f.decomposition()) {
      merged.reset();
      break;
    }
    for (const KernelTerm& t : f.decomposition()->terms) merged->terms.push_back({c * t.coefficient, t.center});
    merged->sigma3_coefficient += c * f.decomposition()->sigma3_coefficient;
  }
  auto captured = parts;
  return FockFunction(
      std::move(label),
      [captured](ComplexPoint z) {
        std::vector<LogComplex> values;
        values.reserve(captured.size());
        for (const auto& [c, f] : captured) {
          if (c == Complex{0.0, 0.0}) continue;
          values.push_back(LogComplex::from_complex(c) * f.weighted(z));
        }
        return log_sum(values);
      },
      std::move(merged));
}

Complex inner_product_closed_form(const FockFunction& f, const FockFunction& g) {
  if (g.decomposition()) {
    const KernelDecomposition& d = *g.decomposition();
    Complex acc{0.0, 0.0};
    for (const KernelTerm& t : d.terms) acc += std::conj(t.coefficient) * f.weighted_value(t.center);
    if (d.sigma3_coefficient != Complex{0.0, 0.0}) {
      if (!f.decomposition()) {
        throw UnsupportedMethod("inner_product: closed form needs a decomposition of " + f.label() +
                                " to pair with the sigma3 part of " + g.label());
      }
      acc += std::conj(d.sigma3_coefficient) * against_sigma3(*f.decomposition());
    }
    return acc;
  }
  if (f.decomposition()) return std::conj(inner_product_closed_form(g, f));
  throw UnsupportedMethod("inner_product: closed form needs a kernel decomposition of " + f.label() + " or " +
                          g.label());
}

QuadratureResult inner_product_quadrature(const FockFunction& f, const FockFunction& g, const QuadratureSpec& spec) {
  return integrate_plane([&](ComplexPoint z) { return f.weighted(z) * g.weighted(z).conj(); }, spec);
}

Complex inner_product(const FockFunction& f, const FockFunction& g, InnerProductMethod method,
                      const QuadratureSpec& spec) {
  if (method == InnerProductMethod::closed_form) return inner_product_closed_form(f, g);
  return inner_product_quadrature(f, g, spec).value;
}

QuadratureSpec suggested_spec(const FockFunction& f, const FockFunction& g, double step) {
  std::vector<ComplexPoint> centers;
  auto collect = [&centers](const FockFunction& h) {
    for (const KernelTerm& t : h.decomposition()->terms) centers.push_back(t.center);
  };
  if (pure_kernels(f) && (!pure_kernels(g) || f.decomposition()->terms.size() <= g.decomposition()->terms.size())) {
    collect(f);
  } else if (pure_kernels(g)) {
    collect(g);
  } else {
    if (f.decomposition()) collect(f);
    if (g.decomposition()) collect(g);
    QuadratureSpec spec = QuadratureSpec::covering(centers, step);
    spec.truncation_radius = std::max(spec.truncation_radius, 24.0);
    return spec;
  }
  return QuadratureSpec::covering(centers, step);
}

double norm(const FockFunction& f, const QuadratureSpec& spec) {
  const QuadratureResult q = inner_product_quadrature(f, f, spec);
  const double sq = q.value.real();
  if (sq < -q.error_estimate) {
    throw NumericalFailure("norm: negative squared norm for " + f.label() + " beyond the quadrature error");
  }
  return std::sqrt(std::max(sq, 0.0));
}

double sigma3_norm_squared() {
  static const double value = [] {
    QuadratureSpec spec;
    spec.truncation_radius = 48.0;
    spec.step = 0.05;
    return integrate_plane([](ComplexPoint z) {
             const LogComplex s = sigma::sigma3_weighted(z);
             return s * s.conj();
           },
                           spec)
        .value.real();
  }();
  return value;
}

Complex bargmann_gabor_phase(const GaborAtom& atom) { return unit_phasor(normalize_phase(kPi * atom.x * atom.y)); }

FockFunction bargmann_gabor(const GaborAtom& atom) {
  const ComplexPoint center{atom.x, -atom.y};
  KernelDecomposition d;
  d.terms.push_back({bargmann_gabor_phase(atom), center});
  std::ostringstream label;
  label << "bargmann_gabor(" << atom.x << "," << atom.y << ")";
  return from_decomposition(label.str(), std::move(d));
}

RealLineSignal gabor_signal(const GaborAtom& atom) {
  RealLineSignal s;
  std::ostringstream label;
  label << "gabor(" << atom.x << "," << atom.y << ")";
  s.label = label.str();
  s.value = [atom](double t) {
    return std::exp(-kPi * (t - atom.x) * (t - atom.x)) * unit_phasor(normalize_phase(2.0 * kPi * atom.y * t));
  };
  s.support_min = atom.x - 40.0;
  s.support_max = atom.x + 40.0;
  return s;
}

LogComplex bargmann_numeric(const RealLineSignal& f, ComplexPoint z) {
  require_finite(z, "bargmann_numeric");
  if (std::abs(z) > 20.0) throw DomainError("bargmann_numeric: |z| must be <= 20");
  constexpr double kStep = 0.01;
  const double t_max = std::max(8.0, std::abs(z.real()) + 6.0);
  if (f.support_min > -t_max || f.support_max < t_max) {
    throw DomainError("bargmann_numeric: signal " + f.label + " is not available on the quadrature interval");
  }
  const std::size_t count = static_cast<std::size_t>(std::ceil(2.0 * t_max / kStep - 1e-9));
  const Complex shift = -kPi * z * z / 2.0 - kPi * std::norm(z) / 2.0;
  std::vector<LogComplex> terms(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = -t_max + (static_cast<double>(k) + 0.5) * kStep;
    const LogComplex sample = LogComplex::from_complex(f.value(t));
    terms[k] = sample * LogComplex::from_log(-kPi * t * t + 2.0 * kPi * t * z + shift);
  }
  const LogComplex sum = log_sum(terms);
  double peak = -std::numeric_limits<double>::infinity();
  for (const LogComplex& t : terms) peak = std::max(peak, t.log_mag());
  const double edge = std::max(terms.front().log_mag(), terms.back().log_mag());
  if (!sum.is_zero() && edge - peak > std::log(1e-14)) {
    throw DomainError("bargmann_numeric: integrand of " + f.label + " has not decayed at the interval ends");
  }
  return sum.scaled(std::log(kStep * kFourthRootTwo));
}

Complex l2_inner_product(const RealLineSignal& f, const RealLineSignal& g, double step) {
  const double a = std::max(f.support_min, g.support_min);
  const double b = std::min(f.support_max, g.support_max);
  if (!(b > a)) return {0.0, 0.0};
  const std::size_t count = static_cast<std::size_t>(std::ceil((b - a) / step));
  const double h = (b - a) / static_cast<double>(count);
  Complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < count; ++k) {
    const double t = a + (static_cast<double>(k) + 0.5) * h;
    acc += f.value(t) * std::conj(g.value(t));
  }
  return acc * h;
}

}  // namespace fockgabor::fock
