#include "fockgabor/lattice_series.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fockgabor/errors.hpp"

namespace fockgabor::series {

namespace {

double lattice_log_weight(LatticeIndex w) { return std::log1p(std::abs(w.point())); }

std::vector<LatticeIndex> annulus(double inner, double outer) {
  std::vector<LatticeIndex> out;
  for (LatticeIndex w : sigma::lattice_points(outer)) {
    if (std::abs(w.point()) > inner) out.push_back(w);
  }
  return out;
}

// 1 / (sigma_0'(w) e^{-pi|w|^2/2}), the normalisation of h_w.
Complex biorthogonal_scale(LatticeIndex w) { return 1.0 / sigma::sigma0_prime_at_lattice(w).to_complex(); }

bool is_pure_kernel(const FockFunction& f) {
  return f.decomposition() && f.decomposition()->sigma3_coefficient == Complex{0.0, 0.0};
}

// Weighted F2(xi)/(xi - mu) for F2(mu) = 0.
Complex divided_by_zero(const FockFunction& f2, ComplexPoint mu, ComplexPoint xi) {
  const Complex d = xi - mu;
  if (std::abs(d) > 1e-9) return f2.weighted_value(xi) / d;
  constexpr double h = 1e-6;
  const double shift_plus = kPi * (std::norm(mu + h) - std::norm(xi)) / 2.0;
  const double shift_minus = kPi * (std::norm(mu - h) - std::norm(xi)) / 2.0;
  const Complex plus = f2.weighted(mu + h).scaled(shift_plus).to_complex();
  const Complex minus = f2.weighted(mu - h).scaled(shift_minus).to_complex();
  return (plus - minus) / (2.0 * h);
}

}  // namespace

double LatticeCoefficients::partial_l2(double radius) const {
  double acc = 0.0;
  for (const auto& [w, c] : entries) {
    if (std::abs(w.point()) <= radius) acc += std::norm(c);
  }
  return acc;
}

double LatticeCoefficients::log_growth_constant() const {
  double best = 0.0;
  for (const auto& [w, c] : entries) best = std::max(best, std::norm(c) / lattice_log_weight(w));
  return best;
}

Complex coeff_a(const FockFunction& f, LatticeIndex w) { return f.weighted_value(w.point()); }

LatticeCoefficients a_coefficients(const FockFunction& f, double truncation_radius) {
  LatticeCoefficients out;
  out.kind = CoefficientKind::a;
  out.source_label = f.label();
  out.truncation_radius = truncation_radius;
  for (LatticeIndex w : sigma::lattice_points(truncation_radius)) out.entries[w] = coeff_a(f, w);
  return out;
}

LogComplex biorthogonal_weighted(LatticeIndex w, ComplexPoint z) {
  if (w.is_origin()) throw DomainError("biorthogonal_weighted: w must be nonzero");
  const std::array<LatticeIndex, 2> removed{LatticeIndex{0, 0}, w};
  return sigma::sigma_quotient_weighted(z, removed) / sigma::sigma0_prime_at_lattice(w);
}

FockFunction biorthogonal_function(LatticeIndex w) {
  if (w.is_origin()) throw DomainError("biorthogonal_function: w must be nonzero");
  const LogComplex scale = LogComplex::one() / sigma::sigma0_prime_at_lattice(w);
  const std::array<LatticeIndex, 2> removed{LatticeIndex{0, 0}, w};
  return FockFunction("biorthogonal(" + std::to_string(w.m) + "," + std::to_string(w.n) + ")",
                      [scale, removed](ComplexPoint z) { return sigma::sigma_quotient_weighted(z, removed) * scale; });
}

std::vector<CoefficientB> coeff_b_many(const FockFunction& f, std::span<const LatticeIndex> ws,
                                       const QuadratureSpec& spec) {
  std::vector<Complex> scale(ws.size());
  for (std::size_t k = 0; k < ws.size(); ++k) {
    if (ws[k].is_origin()) throw DomainError("coeff_b: w must be nonzero");
    scale[k] = biorthogonal_scale(ws[k]);
  }
  const std::vector<LatticeIndex> points(ws.begin(), ws.end());
  const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> out) {
    const Complex fz = std::conj(f.weighted_value(z));
    if (fz == Complex{0.0, 0.0}) {
      std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
      return;
    }
    const sigma::SigmaSample s = sigma::sample_sigma(z);
    for (std::size_t k = 0; k < points.size(); ++k) out[k] = s.sigma0_over(points[k]) * scale[k] * fz;
  };
  const std::vector<QuadratureResult> q = integrate_plane(integrand, points.size(), spec);
  std::vector<CoefficientB> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    out[k].value = q[k].value;
    out[k].error_estimate = q[k].error_estimate;
    if (is_pure_kernel(f)) {
      Complex acc{0.0, 0.0};
      for (const fock::KernelTerm& t : f.decomposition()->terms) {
        acc += std::conj(t.coefficient) * biorthogonal_weighted(points[k], t.center).to_complex();
      }
      out[k].closed_form = acc;
    }
  }
  return out;
}

CoefficientB coeff_b(const FockFunction& f, LatticeIndex w, const QuadratureSpec& spec) {
  const std::array<LatticeIndex, 1> one{w};
  return coeff_b_many(f, one, spec).front();
}

LatticeCoefficients b_coefficients(const FockFunction& f, double truncation_radius, const QuadratureSpec& spec) {
  const std::vector<LatticeIndex> ws = sigma::lattice_points(truncation_radius);
  const std::vector<CoefficientB> b = coeff_b_many(f, ws, spec);
  LatticeCoefficients out;
  out.kind = CoefficientKind::b;
  out.source_label = f.label();
  out.truncation_radius = truncation_radius;
  for (std::size_t k = 0; k < ws.size(); ++k) out.entries[ws[k]] = b[k].value;
  return out;
}

Cl3Report check_cl3(double w_max, const QuadratureSpec& spec) {
  if (w_max < 4.0) throw DomainError("check_cl3: w_max must be >= 4");
  std::vector<LatticeIndex> reps;
  for (LatticeIndex w : sigma::lattice_points(w_max)) {
    if (w.m >= 1 && w.n >= 0 && w.n <= w.m) reps.push_back(w);
  }
  const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> out) {
    const sigma::SigmaSample s = sigma::sample_sigma(z);
    for (std::size_t k = 0; k < reps.size(); ++k) out[k] = std::norm(s.sigma0_over(reps[k]));
  };
  const std::vector<QuadratureResult> q = integrate_plane(integrand, reps.size(), spec);

  // Mean of |sigma e^{-pi|z|^2/2}|^2 over a period cell.
  constexpr int kCell = 200;
  double mean = 0.0;
  for (int j = 0; j < kCell; ++j) {
    for (int i = 0; i < kCell; ++i) {
      const ComplexPoint z{-0.5 + (i + 0.5) / kCell, -0.5 + (j + 0.5) / kCell};
      mean += std::exp(2.0 * sigma::sigma_weighted(z).log_mag());
    }
  }
  mean /= static_cast<double>(kCell) * kCell;

  // Integral of 1/(|z|^2 |z-w|^2) outside the window: coarse midpoint grid up
  // to 8R, then the |z|^{-4} exterior integral (pi + 2)/(2 R'^2).
  const double r = spec.truncation_radius;
  const double outer = 8.0 * r;
  const double coarse = 0.5;
  const int cells = static_cast<int>(std::ceil(2.0 * outer / coarse));
  std::vector<double> tail(reps.size(), 0.0);
  for (int j = 0; j < cells; ++j) {
    const double y = spec.origin.imag() - outer + (j + 0.5) * coarse;
    for (int i = 0; i < cells; ++i) {
      const double x = spec.origin.real() - outer + (i + 0.5) * coarse;
      if (std::abs(x - spec.origin.real()) < r && std::abs(y - spec.origin.imag()) < r) continue;
      const ComplexPoint z{x, y};
      for (std::size_t k = 0; k < reps.size(); ++k) {
        tail[k] += coarse * coarse / (std::norm(z) * std::norm(z - reps[k].point()));
      }
    }
  }
  Cl3Report report;
  report.truncation_radius = r;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const double t = mean * (tail[k] + (kPi + 2.0) / (2.0 * outer * outer));
    Cl3Entry e;
    e.w = reps[k];
    const double sq = q[k].value.real() + t;
    e.norm = std::sqrt(sq);
    e.error_estimate = (q[k].error_estimate + 0.2 * t) / (2.0 * e.norm);
    const double aw = std::abs(reps[k].point());
    e.ratio = e.norm * aw / std::sqrt(std::log1p(aw));
    report.max_ratio = std::max(report.max_ratio, e.ratio);
    report.entries.push_back(e);
  }
  return report;
}

DivisibleFunction shifted_sigma0(ComplexPoint a) {
  require_finite(a, "shifted_sigma0");
  DivisibleFunction g;
  g.label = "shifted_sigma0";
  auto phase = [a](ComplexPoint z) { return LogComplex::from_polar(0.0, kPi * (std::conj(a) * z).imag()); };
  g.weighted = [a, phase](ComplexPoint z) { return sigma::sigma0_weighted(z - a) * phase(z); };
  g.weighted_quotient = [a, phase](ComplexPoint z, std::span<const ComplexPoint> zeros) {
    std::vector<LatticeIndex> removed{{0, 0}};
    for (ComplexPoint p : zeros) {
      const LatticeIndex w = sigma::nearest_lattice_point(p - a);
      if (std::abs(p - a - w.point()) > 1e-12 || w.is_origin()) {
        throw DomainError("shifted_sigma0: quotient by a point that is not a zero");
      }
      removed.push_back(w);
    }
    return sigma::sigma_quotient_weighted(z - a, removed) * phase(z);
  };
  return g;
}

IdentityCheck lemma3_identity(const DivisibleFunction& g, ComplexPoint l1, ComplexPoint l2, ComplexPoint l3,
                              const FockFunction& f, const LatticeCoefficients& b, const QuadratureSpec& spec) {
  const std::array<ComplexPoint, 3> zeros{l1, l2, l3};
  for (std::size_t i = 0; i < 3; ++i) {
    require_finite(zeros[i], "lemma3_identity");
    if (sigma::dist_to_lattice(zeros[i]) == 0.0) throw PreconditionError("lemma3_identity: zero on the lattice");
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (zeros[i] == zeros[j]) throw PreconditionError("lemma3_identity: coincident points");
    }
  }
  IdentityCheck out;
  const QuadratureResult q = integrate_plane(
      [&](ComplexPoint z) { return g.weighted_quotient(z, zeros) * f.weighted(z).conj(); }, spec);
  out.lhs = q.value;
  out.quadrature_error = q.error_estimate;

  auto factor = [&](LatticeIndex w) {
    const ComplexPoint p = w.point();
    return g.weighted(p).to_complex() / ((p - l1) * (p - l2) * (p - l3));
  };
  Complex rhs{0.0, 0.0};
  for (const auto& [w, bw] : b.entries) {
    rhs += factor(w) * bw;
    ++out.terms;
  }
  out.rhs = rhs;
  out.gap = std::abs(out.lhs - out.rhs);

  const double cb = b.log_growth_constant();
  double coef = 0.0;
  double growth = 0.0;
  for (LatticeIndex w : annulus(b.truncation_radius, 2.0 * b.truncation_radius)) {
    coef += std::norm(factor(w));
    growth += cb * lattice_log_weight(w);
  }
  out.tail_estimate = std::sqrt(coef * growth);
  return out;
}

IdentityCheck lemma3_identity(const DivisibleFunction& g, ComplexPoint l1, ComplexPoint l2, ComplexPoint l3,
                              const FockFunction& f, double trunc, const QuadratureSpec& spec) {
  return lemma3_identity(g, l1, l2, l3, f, b_coefficients(f, trunc, spec), spec);
}

QuadratureResult cauchy_integral(const PlaneIntegrand& f, ComplexPoint z, double radius, double step) {
  require_finite(z, "cauchy_integral");
  QuadratureSpec coarse = QuadratureSpec::localized(z, std::ceil(radius / step - 1e-9) * step, step);
  QuadratureSpec fine = coarse;
  fine.step = step / 2.0;
  const PlaneIntegrand g = [&](ComplexPoint xi) { return f(xi) / LogComplex::from_complex(z - xi); };
  const QuadratureResult a = integrate_plane(g, coarse);
  QuadratureResult b = integrate_plane(g, fine);
  b.richardson = std::abs(b.value - a.value);
  b.error_estimate = b.tail_bound + b.richardson + b.rounding;
  return b;
}

IdentityCheck dople_identity(const FockFunction& f1, const FockFunction& f2, ComplexPoint z, ComplexPoint mu,
                             double trunc, const QuadratureSpec& spec) {
  require_finite(z, "dople_identity");
  require_finite(mu, "dople_identity");
  for (ComplexPoint p : {z, mu}) {
    const LatticeIndex w = sigma::nearest_lattice_point(p);
    if (!w.is_origin() && w.point() == p) throw PreconditionError("dople_identity: z and mu must avoid Z_0");
  }
  if (f2.weighted(mu).abs() > 1e-8) throw PreconditionError("dople_identity: F2(mu) != 0");

  const std::vector<LatticeIndex> ws = sigma::lattice_points(trunc);
  const std::vector<CoefficientB> b = coeff_b_many(f1, ws, spec);
  auto kernel = [&](LatticeIndex w) {
    const ComplexPoint p = w.point();
    return 1.0 / (z - p) + 1.0 / (p - mu);
  };
  IdentityCheck out;
  Complex lhs{0.0, 0.0};
  double b_err = 0.0;
  for (std::size_t k = 0; k < ws.size(); ++k) {
    const Complex bw = b[k].closed_form.value_or(b[k].value);
    const Complex term = coeff_a(f2, ws[k]) * kernel(ws[k]);
    lhs += term * bw;
    if (!b[k].closed_form) b_err += std::abs(term) * b[k].error_estimate;
  }
  out.lhs = lhs;
  out.terms = ws.size();

  const double radius = spec.truncation_radius + std::abs(z - spec.origin);
  const QuadratureResult i1 = cauchy_integral(
      [&](ComplexPoint xi) { return f1.weighted(xi).conj() * f2.weighted(xi); }, z, radius, spec.step);
  const QuadratureResult i2 = cauchy_integral(
      [&](ComplexPoint xi) { return f1.weighted(xi).conj() * sigma::sigma0_weighted(xi); }, z, radius, spec.step);
  const Complex ratio = (f2.weighted(z) / sigma::sigma0_weighted(z)).to_complex();
  const VectorIntegrand last = [&](ComplexPoint xi, std::span<Complex> o) {
    o[0] = divided_by_zero(f2, mu, xi) * std::conj(f1.weighted_value(xi));
  };
  const QuadratureResult i3 = integrate_plane(last, 1, spec).front();
  out.rhs = i1.value - ratio * i2.value + i3.value;
  out.gap = std::abs(out.lhs - out.rhs);
  out.quadrature_error = i1.error_estimate + std::abs(ratio) * i2.error_estimate + i3.error_estimate + b_err;

  double cb = 0.0;
  for (std::size_t k = 0; k < ws.size(); ++k) {
    cb = std::max(cb, std::norm(b[k].closed_form.value_or(b[k].value)) / lattice_log_weight(ws[k]));
  }
  double coef = 0.0;
  double growth = 0.0;
  for (LatticeIndex w : annulus(trunc, 2.0 * trunc)) {
    coef += std::norm(coeff_a(f2, w) * kernel(w));
    growth += cb * lattice_log_weight(w);
  }
  out.tail_estimate = std::sqrt(coef * growth);
  return out;
}

IdentityCheck interp_identity_e2(const FockFunction& h2, ComplexPoint l3, ComplexPoint l4, ComplexPoint z,
                                 double trunc) {
  require_finite(z, "interp_identity_e2");
  if (l3 == l4) throw PreconditionError("interp_identity_e2: l3 and l4 must differ");
  const LatticeIndex near = sigma::nearest_lattice_point(z);
  if (!near.is_origin() && std::abs(z - near.point()) < 0.05) {
    throw PreconditionError("interp_identity_e2: z within 0.05 of Z_0");
  }
  auto term = [&](LatticeIndex w) {
    const Complex a = coeff_a(h2, w);
    if (a == Complex{0.0, 0.0}) return Complex{0.0, 0.0};
    const ComplexPoint p = w.point();
    return a / (sigma::sigma0_prime_at_lattice(w).to_complex() * (z - p) * (l3 - p) * (l4 - p));
  };
  IdentityCheck out;
  for (LatticeIndex w : sigma::lattice_points(trunc)) {
    out.lhs += term(w);
    ++out.terms;
  }
  out.rhs = (h2.weighted(z) / sigma::sigma0_weighted(z)).to_complex() / ((z - l3) * (z - l4));
  out.gap = std::abs(out.lhs - out.rhs);
  for (LatticeIndex w : annulus(trunc, 2.0 * trunc)) out.tail_estimate += std::abs(term(w));
  return out;
}

ResidueCheck e2_residue(const FockFunction& h2, ComplexPoint l3, ComplexPoint l4, LatticeIndex w0) {
  if (w0.is_origin()) throw DomainError("e2_residue: w0 must be nonzero");
  const ComplexPoint p = w0.point();
  const Complex a = coeff_a(h2, w0);
  ResidueCheck out;
  out.lhs = a / (sigma::sigma0_prime_at_lattice(w0).to_complex() * (l3 - p) * (l4 - p));
  const std::array<LatticeIndex, 2> removed{LatticeIndex{0, 0}, w0};
  const Complex s0prime = sigma::sigma_quotient_weighted(p, removed).to_complex();
  out.rhs = a / (s0prime * (p - l3) * (p - l4));
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace fockgabor::series
