#include "fockgabor/counterexample.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "fockgabor/errors.hpp"

namespace fockgabor::construction {

namespace {

constexpr std::array<LatticeIndex, 4> kSigma3Zeros{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}};
constexpr double kDeflationWindow = 1e-2;
constexpr double kDifferenceStep = 1e-5;
constexpr double kMargin = 0.05;

// Weighted normalized kernel at a real center.
Complex real_kernel(double c, ComplexPoint z) {
  return std::polar(std::exp(-kPi * std::norm(z - c) / 2.0), kPi * c * z.imag());
}

bool sigma3_zero(LatticeIndex w) { return !(w.n == 0 && w.m >= 0 && w.m <= 3); }

double real_sign(const LogComplex& v) {
  if (v.is_zero()) return 0.0;
  return std::abs(v.phase()) > kPi / 2.0 ? -1.0 : 1.0;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Newton on f deflated by `known`, with the logarithmic derivative taken by a
// central difference in the weighted representation.
std::optional<ComplexPoint> newton(const FockFunction& f, ComplexPoint start, std::span<const ComplexPoint> known) {
  ComplexPoint z = start;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    const LogComplex f0 = f.weighted(z);
    if (f0.is_zero()) return z;
    const ComplexPoint zp = z + kDifferenceStep;
    const ComplexPoint zm = z - kDifferenceStep;
    const LogComplex fp = f.weighted(zp).scaled(kPi * (std::norm(zp) - std::norm(z)) / 2.0);
    const LogComplex fm = f.weighted(zm).scaled(kPi * (std::norm(zm) - std::norm(z)) / 2.0);
    const double scale = std::max(fp.log_mag(), fm.log_mag());
    const Complex d = (fp.to_complex_scaled(scale) - fm.to_complex_scaled(scale)) / (2.0 * kDifferenceStep);
    if (d == Complex{0.0, 0.0}) return std::nullopt;
    const double log_ratio = std::log(std::abs(d)) + scale - f0.log_mag();
    if (log_ratio > 700.0) return z;
    Complex ell = d * std::polar(std::exp(scale - f0.log_mag()), -f0.phase());
    for (ComplexPoint k : known) ell -= 1.0 / (z - k);
    if (ell == Complex{0.0, 0.0}) return std::nullopt;
    Complex step = -1.0 / ell;
    if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
    z += step;
    last_step = std::abs(step);
    if (last_step <= 1e-14 * std::max(1.0, std::abs(z))) return z;
  }
  if (last_step <= 1e-10 * std::max(1.0, std::abs(z))) return z;
  return std::nullopt;
}

bool by_modulus(ComplexPoint a, ComplexPoint b) {
  const double na = std::norm(a);
  const double nb = std::norm(b);
  if (na != nb) return na < nb;
  return std::arg(a) < std::arg(b);
}

}  // namespace

std::vector<double> ConstructionParams::u() const {
  std::vector<double> out;
  double value = q;
  for (int n = 0; n < levels; ++n, value *= 2.0) out.push_back(value);
  return out;
}

double ConstructionParams::required_radius() const {
  const double top = std::ldexp(static_cast<double>(q), levels - 1);
  return top + 2.0 * std::sqrt(top) + 8.0;
}

void ConstructionParams::validate() const {
  if (q < 4) throw DomainError("construction: q must be >= 4");
  if (levels < 1 || levels > 8) throw DomainError("construction: levels must lie in [1, 8]");
  if (!(tol_root > 0.0) || !(tol_solve > 0.0)) throw DomainError("construction: tolerances must be positive");
  if (!(trunc >= 1.0)) throw DomainError("construction: trunc must be >= 1");
  spec.validate();
  if (spec.truncation_radius < required_radius()) {
    throw DomainError("construction: quad_radius " + fmt(spec.truncation_radius) + " is below u_N + 2 sqrt(u_N) + 8 = " +
                      fmt(required_radius()));
  }
}

ConstructionParams ConstructionParams::with_window(int q, int levels, double step) {
  ConstructionParams p;
  p.q = q;
  p.levels = levels;
  p.spec.step = step;
  p.spec.truncation_radius = std::ceil(p.required_radius());
  return p;
}

FockFunction build_F(const ConstructionParams& params) {
  fock::KernelDecomposition d;
  d.sigma3_coefficient = {1.0, 0.0};
  for (double u : params.u()) {
    const double c = 1.0 / std::sqrt(u);
    d.terms.push_back({{c, 0.0}, {u, 0.0}});
    d.terms.push_back({{-c, 0.0}, {u + 1.0, 0.0}});
  }
  return fock::from_decomposition("F", std::move(d));
}

double find_beta(const FockFunction& f, double u, double tol_root) {
  double a = u + 1.0 / 3.0;
  double b = u + 2.0 / 3.0;
  LogComplex fa = f.weighted(a);
  LogComplex fb = f.weighted(b);
  const double sa = real_sign(fa);
  if (sa * real_sign(fb) >= 0.0) {
    throw PreconditionError("find_beta: no sign change of F on (u + 1/3, u + 2/3) at u = " + fmt(u) +
                            "; increase q");
  }
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const LogComplex fm = f.weighted(m);
    if (fm.is_zero()) {
      a = b = m;
      fa = fb = fm;
      break;
    }
    if (real_sign(fm) == sa) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  const double root = fa.abs() <= fb.abs() ? a : b;
  const double residual = std::min(fa.abs(), fb.abs());
  if (residual > tol_root) {
    throw NumericalFailure("find_beta: residual " + fmt(residual) + " above tol_root at u = " + fmt(u));
  }
  return root - u;
}

std::vector<double> find_betas(const FockFunction& f, const ConstructionParams& params) {
  std::vector<double> out;
  for (double u : params.u()) out.push_back(find_beta(f, u, params.tol_root));
  return out;
}

ZeroScan scan_zeros(const FockFunction& f, double radius) {
  if (!(radius >= 1.0)) throw DomainError("scan_zeros: radius must be >= 1");
  const int half = static_cast<int>(std::floor(radius));
  const int cells = 2 * half + 1;
  const double x0 = -half - 0.37;
  const double y0 = -half - 0.39;
  auto corner = [&](int i, int j) { return ComplexPoint{x0 + i, y0 + j}; };
  auto phase = [&](ComplexPoint z) {
    const LogComplex q = f.weighted(z) / sigma::sigma3_weighted(z);
    return q.phase();
  };

  std::vector<double> corner_phase(static_cast<std::size_t>(cells + 1) * (cells + 1));
  auto cp = [&](int i, int j) -> double& { return corner_phase[static_cast<std::size_t>(j) * (cells + 1) + i]; };
  for (int j = 0; j <= cells; ++j) {
    for (int i = 0; i <= cells; ++i) cp(i, j) = phase(corner(i, j));
  }

  auto segment = [&](auto&& self, ComplexPoint a, ComplexPoint b, double pa, double pb, int depth) -> double {
    const double d = normalize_phase(pb - pa);
    if (std::abs(d) < kPi / 4.0 || depth >= 30) return d;
    const ComplexPoint m = 0.5 * (a + b);
    const double pm = phase(m);
    return self(self, a, m, pa, pm, depth + 1) + self(self, m, b, pm, pb, depth + 1);
  };
  auto edge = [&](ComplexPoint a, ComplexPoint b, double pa, double pb) {
    constexpr int kPieces = 4;
    double total = 0.0;
    double prev = pa;
    ComplexPoint prev_z = a;
    for (int k = 1; k <= kPieces; ++k) {
      const ComplexPoint z = a + (b - a) * (static_cast<double>(k) / kPieces);
      const double p = k == kPieces ? pb : phase(z);
      total += segment(segment, prev_z, z, prev, p, 0);
      prev = p;
      prev_z = z;
    }
    return total;
  };

  const std::size_t stride = static_cast<std::size_t>(cells + 1);
  std::vector<double> horizontal(stride * stride, 0.0);
  std::vector<double> vertical(stride * stride, 0.0);
  for (int j = 0; j <= cells; ++j) {
    for (int i = 0; i <= cells; ++i) {
      if (i < cells) horizontal[j * stride + i] = edge(corner(i, j), corner(i + 1, j), cp(i, j), cp(i + 1, j));
      if (j < cells) vertical[j * stride + i] = edge(corner(i, j), corner(i, j + 1), cp(i, j), cp(i, j + 1));
    }
  }

  auto winding_of = [&](ComplexPoint lo, ComplexPoint hi) {
    const std::array<ComplexPoint, 4> c{lo, ComplexPoint{hi.real(), lo.imag()}, hi, ComplexPoint{lo.real(), hi.imag()}};
    std::array<double, 4> p{};
    for (std::size_t k = 0; k < 4; ++k) p[k] = phase(c[k]);
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) total += edge(c[k], c[(k + 1) % 4], p[k], p[(k + 1) % 4]);
    return total / (2.0 * kPi);
  };
  // Finds `count` zeros in [lo, hi); splits into quarters when Newton from a
  // few starts does not produce all of them.
  auto solve = [&](auto&& self, ComplexPoint lo, ComplexPoint hi, long count, int depth,
                   std::vector<ComplexPoint>& out) -> bool {
    if (count <= 0) return count == 0;
    auto inside = [&](ComplexPoint z) {
      return z.real() >= lo.real() && z.real() < hi.real() && z.imag() >= lo.imag() && z.imag() < hi.imag();
    };
    std::vector<ComplexPoint> starts;
    const LatticeIndex near = sigma::nearest_lattice_point(0.5 * (lo + hi));
    if (inside(near.point())) starts.push_back(near.point());
    for (double fy : {0.5, 0.25, 0.75}) {
      for (double fx : {0.5, 0.25, 0.75}) {
        starts.push_back(lo + ComplexPoint{fx * (hi - lo).real(), fy * (hi - lo).imag()});
      }
    }
    std::vector<ComplexPoint> found;
    for (ComplexPoint s : starts) {
      if (static_cast<long>(found.size()) >= count) break;
      const std::optional<ComplexPoint> z = newton(f, s, found);
      if (!z || !inside(*z)) continue;
      if (std::none_of(found.begin(), found.end(), [&](ComplexPoint q) { return std::abs(q - *z) < 1e-8; })) {
        found.push_back(*z);
      }
    }
    if (static_cast<long>(found.size()) == count) {
      out.insert(out.end(), found.begin(), found.end());
      return true;
    }
    if (depth >= 6) {
      out.insert(out.end(), found.begin(), found.end());
      return false;
    }
    const ComplexPoint mid = lo + 0.5123 * (hi - lo);
    const std::array<std::pair<ComplexPoint, ComplexPoint>, 4> quarters{{
        {lo, mid},
        {{mid.real(), lo.imag()}, {hi.real(), mid.imag()}},
        {{lo.real(), mid.imag()}, {mid.real(), hi.imag()}},
        {mid, hi},
    }};
    bool ok = true;
    long total = 0;
    for (const auto& [a, b] : quarters) {
      const double wq = winding_of(a, b);
      const long rq = std::lround(wq);
      const LatticeIndex lp = sigma::nearest_lattice_point(0.5 * (a + b));
      const ComplexPoint pt = lp.point();
      const bool has_zero = sigma3_zero(lp) && pt.real() >= a.real() && pt.real() < b.real() &&
                            pt.imag() >= a.imag() && pt.imag() < b.imag();
      const long cq = rq + (has_zero ? 1 : 0);
      if (std::abs(wq - static_cast<double>(rq)) > 0.01 || cq < 0) {
        ok = false;
        continue;
      }
      total += cq;
      ok = self(self, a, b, cq, depth + 1, out) && ok;
    }
    return ok && total == count;
  };

  ZeroScan scan;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const LatticeIndex w{i - half, j - half};
      const double winding = (horizontal[j * stride + i] + vertical[j * stride + i + 1] -
                              horizontal[(j + 1) * stride + i] - vertical[j * stride + i]) /
                             (2.0 * kPi);
      const long rounded = std::lround(winding);
      const long count = rounded + (sigma3_zero(w) ? 1 : 0);
      if (std::abs(winding - static_cast<double>(rounded)) > 0.01 || count < 0) {
        scan.mismatched_cells.push_back(w);
        continue;
      }
      scan.counted += static_cast<std::size_t>(count);
      if (count == 0) continue;

      std::vector<ComplexPoint> found;
      if (!solve(solve, corner(i, j), corner(i + 1, j + 1), count, 0, found)) scan.mismatched_cells.push_back(w);
      for (ComplexPoint z : found) {
        scan.max_residual = std::max(scan.max_residual, f.weighted(z).abs());
        scan.zeros.push_back(z);
      }
    }
  }
  std::sort(scan.zeros.begin(), scan.zeros.end(), by_modulus);
  return scan;
}

std::vector<double> choose_vs(std::span<const double> u, std::span<const ComplexPoint> avoid) {
  std::vector<double> vs;
  for (double un : u) {
    const double center = un - std::sqrt(un);
    std::optional<double> chosen;
    for (int k = 0; k <= 100 && !chosen; ++k) {
      const int j = (k + 1) / 2;
      const double offset = (k % 2 == 1 ? 1.0 : -1.0) * 0.01 * j;
      const double v = center + offset;
      const double slack = 1e-12;
      if (sigma::dist_to_lattice({v, 0.0}) < kMargin - slack) continue;
      if (std::any_of(avoid.begin(), avoid.end(), [&](ComplexPoint p) { return std::abs(p - v) < kMargin - slack; })) {
        continue;
      }
      if (std::any_of(vs.begin(), vs.end(), [&](double p) { return std::abs(p - v) < kMargin - slack; })) continue;
      chosen = v;
    }
    if (!chosen) throw PreconditionError("choose_vs: no admissible v near u - sqrt(u) for u = " + fmt(un));
    vs.push_back(*chosen);
  }
  return vs;
}

Model::Model(std::vector<double> u, std::vector<double> roots, std::vector<double> vs, std::vector<double> ds)
    : u_(std::move(u)), roots_(std::move(roots)), vs_(std::move(vs)), ds_(std::move(ds)) {
  if (roots_.size() != u_.size() || vs_.size() != u_.size() || ds_.size() != u_.size()) {
    throw DomainError("Model: inconsistent level counts");
  }
  for (double r : roots_) root_values_.push_back(weighted_f_at({r, 0.0}));
}

Complex Model::weighted_sigma3(const sigma::SigmaSample& s) const { return s.quotient(kSigma3Zeros).to_complex(); }

Complex Model::weighted_f(ComplexPoint z, const sigma::SigmaSample& s) const {
  Complex acc = weighted_sigma3(s);
  for (double u : u_) acc += (real_kernel(u, z) - real_kernel(u + 1.0, z)) / std::sqrt(u);
  return acc;
}

Complex Model::weighted_f_at(ComplexPoint z) const { return weighted_f(z, sigma::sample_sigma(z)); }

Complex Model::g1(ComplexPoint z) const {
  Complex acc{1.0, 0.0};
  for (double v : vs_) acc *= 1.0 - z / v;
  return acc;
}

Complex Model::s(ComplexPoint z) const {
  Complex acc{1.0, 0.0};
  for (double r : roots_) acc *= 1.0 - z / r;
  return acc;
}

Complex Model::divided_f(ComplexPoint z, ComplexPoint a, Complex fa, const sigma::SigmaSample& s) const {
  const Complex d = z - a;
  if (std::abs(d) >= kDeflationWindow) return weighted_f(z, s) / d;
  if (std::abs(d) >= 1e-6) {
    return (weighted_f(z, s) - fa * std::exp(kPi * (std::norm(a) - std::norm(z)) / 2.0)) / d;
  }
  const ComplexPoint mid = 0.5 * (z + a);
  const ComplexPoint p = mid + kDifferenceStep;
  const ComplexPoint m = mid - kDifferenceStep;
  const Complex fp = weighted_f_at(p) * std::exp(kPi * (std::norm(p) - std::norm(z)) / 2.0);
  const Complex fm = weighted_f_at(m) * std::exp(kPi * (std::norm(m) - std::norm(z)) / 2.0);
  return (fp - fm) / (2.0 * kDifferenceStep);
}

Complex Model::weighted_g2(ComplexPoint z, const sigma::SigmaSample& s) const {
  for (std::size_t n = 0; n < roots_.size(); ++n) {
    const double r = roots_[n];
    if (std::abs(z - r) >= kDeflationWindow) continue;
    Complex rest{1.0, 0.0};
    for (std::size_t m = 0; m < roots_.size(); ++m) {
      if (m != n) rest *= 1.0 - z / roots_[m];
    }
    return -r * divided_f(z, {r, 0.0}, root_values_[n], s) / rest;
  }
  return weighted_f(z, s) / this->s(z);
}

NodeValues Model::node(ComplexPoint z) const { return node(z, sigma::sample_sigma(z)); }

NodeValues Model::node(ComplexPoint z, const sigma::SigmaSample& s) const {
  NodeValues out;
  out.sigma3 = weighted_sigma3(s);
  Complex kernels{0.0, 0.0};
  Complex hk{0.0, 0.0};
  for (std::size_t n = 0; n < u_.size(); ++n) {
    const double u = u_[n];
    const Complex ku = real_kernel(u, z);
    kernels += (ku - real_kernel(u + 1.0, z)) / std::sqrt(u);
    hk += ds_[n] * std::cbrt(1.0 / u) * ku;
  }
  out.f = out.sigma3 + kernels;
  out.h = out.sigma3 + hk;
  const Complex g1v = g1(z);
  out.ratio = g1v / this->s(z);
  bool near_root = false;
  for (double r : roots_) near_root = near_root || std::abs(z - r) < kDeflationWindow;
  out.g2 = near_root ? weighted_g2(z, s) : out.f / this->s(z);
  out.g = g1v * out.g2;
  return out;
}

Complex Model::weighted_g_v(std::size_t n, ComplexPoint z, const NodeValues& values) const {
  const std::array<std::size_t, 1> idx{n};
  return weighted_g_over_vs(idx, z, values);
}

Complex Model::weighted_g_over_vs(std::span<const std::size_t> idx, ComplexPoint z, const NodeValues& values) const {
  Complex acc{1.0, 0.0};
  for (std::size_t m = 0; m < vs_.size(); ++m) {
    const bool removed = std::find(idx.begin(), idx.end(), m) != idx.end();
    acc *= removed ? Complex{-1.0 / vs_[m], 0.0} : 1.0 - z / vs_[m];
  }
  return acc * values.g2;
}

Complex Model::weighted_g_zero(ComplexPoint lambda, Complex flambda, ComplexPoint z,
                               const sigma::SigmaSample& s) const {
  for (double r : roots_) {
    if (std::abs(z - r) < kDeflationWindow) return g1(z) * weighted_g2(z, s) / (z - lambda);
  }
  return g1(z) / this->s(z) * divided_f(z, lambda, flambda, s);
}

SolveReport assemble_and_solve_d(const Model& model, const ConstructionParams& params) {
  const std::size_t n_levels = model.u().size();
  const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> out) {
    const sigma::SigmaSample s = sigma::sample_sigma(z);
    const NodeValues v = model.node(z, s);
    const Complex conj_s3 = std::conj(v.sigma3);
    for (std::size_t n = 0; n < n_levels; ++n) out[n] = model.weighted_g_v(n, z, v) * conj_s3;
  };
  const std::vector<QuadratureResult> q = integrate_plane(integrand, n_levels, params.spec);

  SolveReport report;
  Eigen::MatrixXd a(n_levels, n_levels);
  Eigen::VectorXd rhs(n_levels);
  std::vector<double> raw(n_levels * n_levels);
  for (std::size_t m = 0; m < n_levels; ++m) {
    const double um = model.u()[m];
    const NodeValues v = model.node({um, 0.0});
    for (std::size_t n = 0; n < n_levels; ++n) {
      const double value = model.weighted_g_v(n, {um, 0.0}, v).real();
      raw[n * n_levels + m] = value;
      a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) = std::cbrt(1.0 / um) * value;
    }
  }
  for (std::size_t n = 0; n < n_levels; ++n) {
    report.gamma.push_back(q[n].value.real());
    report.gamma_imag.push_back(q[n].value.imag());
    report.gamma_error.push_back(q[n].error_estimate);
    rhs(static_cast<Eigen::Index>(n)) = -q[n].value.real();
  }
  for (std::size_t n = 0; n < n_levels; ++n) {
    std::vector<double> row;
    double off = 0.0;
    for (std::size_t m = 0; m < n_levels; ++m) {
      const double x = a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
      row.push_back(x);
      if (m != n) off += std::abs(x);
    }
    const double diag = std::abs(a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    report.dominance = std::max(report.dominance, diag > 0.0 ? off / diag : std::numeric_limits<double>::infinity());
    report.matrix.push_back(std::move(row));
    const double un = model.u()[n];
    report.kernel_scaling.push_back(std::sqrt(un) * std::abs(raw[n * n_levels + n]));
    for (std::size_t m = 0; m < n_levels; ++m) {
      if (m != n) {
        report.cross_scaling =
            std::max(report.cross_scaling, std::abs(raw[n * n_levels + m]) * std::max(un, model.u()[m]));
      }
    }
    report.coupling_scaling = std::max(report.coupling_scaling, std::abs(q[n].value) * model.vs()[n]);
  }
  if (!(report.dominance < 1.0)) {
    throw PreconditionError("assemble_and_solve_d: system not diagonally dominant (row ratio " +
                            fmt(report.dominance) + "); increase q");
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd d = lu.solve(rhs);
  report.residual = (a * d - rhs).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd inv = lu.inverse();
  report.condition = a.cwiseAbs().rowwise().sum().maxCoeff() * inv.cwiseAbs().rowwise().sum().maxCoeff();
  for (Eigen::Index n = 0; n < d.size(); ++n) report.ds.push_back(d(n));
  if (report.residual > params.tol_solve) {
    throw NumericalFailure("assemble_and_solve_d: residual " + fmt(report.residual) + " above tol_solve");
  }
  for (double dn : report.ds) {
    if (!(std::abs(dn) < 1.0)) throw PreconditionError("assemble_and_solve_d: |d_n| >= 1; increase q");
  }
  return report;
}

FockFunction build_H(std::span<const double> u, std::span<const double> ds) {
  if (u.size() != ds.size()) throw DomainError("build_H: size mismatch");
  fock::KernelDecomposition d;
  d.sigma3_coefficient = {1.0, 0.0};
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (ds[n] != 0.0) d.terms.push_back({{ds[n] * std::cbrt(1.0 / u[n]), 0.0}, {u[n], 0.0}});
  }
  return fock::from_decomposition("H", std::move(d));
}

namespace {

FockFunction weighted_handle(std::string label, std::function<Complex(ComplexPoint)> eval) {
  return FockFunction(std::move(label), [eval = std::move(eval)](ComplexPoint z) {
    return LogComplex::from_complex(eval(z));
  });
}

FockFunction polynomial_handle(std::string label, std::function<Complex(ComplexPoint)> poly) {
  return FockFunction(std::move(label), [poly = std::move(poly)](ComplexPoint z) {
    return LogComplex::from_complex(poly(z)).scaled(-kPi * std::norm(z) / 2.0);
  });
}

}  // namespace

ConstructionResult build_construction(const ConstructionParams& params) {
  params.validate();
  const std::vector<double> u = params.u();
  const std::size_t n_levels = u.size();
  FockFunction f = build_F(params);
  const std::vector<double> betas = find_betas(f, params);
  std::vector<double> roots;
  std::vector<double> root_residuals;
  for (std::size_t n = 0; n < n_levels; ++n) {
    roots.push_back(u[n] + betas[n]);
    root_residuals.push_back(f.weighted(roots.back()).abs());
  }

  ZeroScan scan = scan_zeros(f, params.spec.truncation_radius);
  std::vector<ComplexPoint> lambda2;
  for (ComplexPoint z : scan.zeros) {
    const bool is_root =
        std::any_of(roots.begin(), roots.end(), [&](double r) { return std::abs(z - r) < 1e-8 * (1.0 + r); });
    if (!is_root) lambda2.push_back(z);
  }
  std::vector<ComplexPoint> avoid = scan.zeros;
  for (double r : roots) avoid.emplace_back(r, 0.0);
  const std::vector<double> vs = choose_vs(u, avoid);

  const Model trial(u, roots, vs, std::vector<double>(n_levels, 0.0));
  SolveReport solve = assemble_and_solve_d(trial, params);
  auto model = std::make_shared<const Model>(u, roots, vs, solve.ds);

  ConstructionResult result{
      params,
      u,
      betas,
      vs,
      solve.ds,
      f,
      build_H(u, solve.ds),
      weighted_handle("G", [model](ComplexPoint z) { return model->node(z).g; }),
      polynomial_handle("G1", [model](ComplexPoint z) { return model->g1(z); }),
      weighted_handle("G2", [model](ComplexPoint z) { return model->node(z).g2; }),
      polynomial_handle("S", [model](ComplexPoint z) { return model->s(z); }),
      {},
      {},
      std::move(lambda2),
      model,
      std::move(scan),
      std::move(solve),
      std::move(root_residuals),
  };
  for (std::size_t n = 0; n < n_levels; ++n) {
    result.g.push_back(weighted_handle("g_v" + std::to_string(n + 1), [model, n](ComplexPoint z) {
      return model->weighted_g_v(n, z, model->node(z));
    }));
    result.lambda1.emplace_back(vs[n], 0.0);
  }
  return result;
}

series::DivisibleFunction generating_function(const ConstructionResult& result) {
  std::shared_ptr<const Model> model = result.model;
  series::DivisibleFunction g;
  g.label = "G";
  g.weighted = [model](ComplexPoint z) { return LogComplex::from_complex(model->node(z).g); };
  g.weighted_quotient = [model](ComplexPoint z, std::span<const ComplexPoint> zeros) {
    std::vector<std::size_t> idx;
    for (ComplexPoint p : zeros) {
      std::size_t found = model->vs().size();
      for (std::size_t m = 0; m < model->vs().size(); ++m) {
        if (std::abs(p - model->vs()[m]) <= 1e-12 * (1.0 + std::abs(p))) found = m;
      }
      if (found == model->vs().size()) throw DomainError("generating_function: quotient only by points of Lambda_1");
      if (std::find(idx.begin(), idx.end(), found) != idx.end()) throw DomainError("generating_function: repeated zero");
      idx.push_back(found);
    }
    return LogComplex::from_complex(model->weighted_g_over_vs(idx, z, model->node(z)));
  };
  return g;
}

namespace {

// The 20 points of Lambda_2 closest to the roots u_n + beta_n.
std::vector<ComplexPoint> sample_lambda2(const ConstructionResult& r, std::size_t count) {
  std::vector<std::pair<double, ComplexPoint>> keyed;
  for (ComplexPoint z : r.lambda2) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < r.u.size(); ++n) d = std::min(d, std::abs(z - (r.u[n] + r.betas[n])));
    keyed.emplace_back(d, z);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return by_modulus(a.second, b.second);
  });
  std::vector<ComplexPoint> out;
  for (std::size_t k = 0; k < std::min(count, keyed.size()); ++k) out.push_back(keyed[k].second);
  return out;
}

}  // namespace

Verification verify_properties(const ConstructionResult& result) {
  const Model& model = *result.model;
  const ConstructionParams& params = result.params;
  const std::size_t n_levels = result.u.size();
  Verification ver;

  const std::vector<ComplexPoint> p2 = sample_lambda2(result, 20);
  for (ComplexPoint z : p2) ver.p2_residual = std::max(ver.p2_residual, result.F.weighted(z).abs());
  ver.p2_samples = p2.size();
  if (ver.p2_residual > 2.0 * params.tol_root) {
    ver.failures.push_back("P2 residual " + fmt(ver.p2_residual) + " above 2 tol_root");
  }

  const std::vector<ComplexPoint> sample_zeros(p2.begin(), p2.begin() + std::min<std::size_t>(4, p2.size()));
  std::vector<Complex> sample_values;
  for (ComplexPoint z : sample_zeros) sample_values.push_back(model.weighted_f_at(z));
  const std::size_t base = n_levels;
  const std::size_t components = base + 6 + n_levels + sample_zeros.size();
  const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> out) {
    const sigma::SigmaSample s = sigma::sample_sigma(z);
    const NodeValues v = model.node(z, s);
    const Complex ch = std::conj(v.h);
    for (std::size_t n = 0; n < n_levels; ++n) {
      const Complex gv = model.weighted_g_v(n, z, v);
      out[n] = gv * ch;
      out[base + 6 + n] = std::norm(gv);
    }
    out[base] = v.f * ch;
    out[base + 1] = std::norm(v.sigma3);
    out[base + 2] = std::norm(v.f - v.sigma3);
    out[base + 3] = std::norm(v.h - v.sigma3);
    out[base + 4] = std::norm(v.f);
    out[base + 5] = std::norm(v.h);
    for (std::size_t k = 0; k < sample_zeros.size(); ++k) {
      out[base + 6 + n_levels + k] = std::norm(model.weighted_g_zero(sample_zeros[k], sample_values[k], z, s));
    }
  };
  const std::vector<QuadratureResult> q = integrate_plane(integrand, components, params.spec);

  for (std::size_t n = 0; n < n_levels; ++n) {
    ver.p3_residual = std::max(ver.p3_residual, std::abs(q[n].value));
    ver.p3_error = std::max(ver.p3_error, q[n].error_estimate);
  }
  const double p3_tol = params.tol_solve * (1.0 + result.solve.condition);
  if (ver.p3_residual > p3_tol) ver.failures.push_back("P3 residual " + fmt(ver.p3_residual) + " above " + fmt(p3_tol));

  ver.p4_value = q[base].value;
  ver.p4_error = q[base].error_estimate;
  ver.p4_closed_form = fock::inner_product_closed_form(result.F, result.H);
  ver.sigma3_norm_sq = q[base + 1].value.real();
  ver.f_deviation = std::sqrt(std::max(0.0, q[base + 2].value.real()));
  ver.h_deviation = std::sqrt(std::max(0.0, q[base + 3].value.real()));
  ver.deviation_constant = (ver.f_deviation + ver.h_deviation) * std::cbrt(static_cast<double>(params.q));
  if (std::abs(ver.p4_value.imag()) > 1e-6) ver.failures.push_back("P4 value not real: " + fmt(ver.p4_value.imag()));
  if (!(ver.p4_value.real() >= 0.5 * ver.sigma3_norm_sq)) {
    ver.failures.push_back("P4 value " + fmt(ver.p4_value.real()) + " below half of ||sigma_3||^2");
  }

  for (std::size_t n = 0; n < n_levels; ++n) {
    ver.g_norms.push_back(std::sqrt(q[base + 6 + n].value.real()));
    ver.g_norm_points.push_back(result.lambda1[n]);
  }
  for (std::size_t k = 0; k < sample_zeros.size(); ++k) {
    ver.g_norms.push_back(std::sqrt(q[base + 6 + n_levels + k].value.real()));
    ver.g_norm_points.push_back(sample_zeros[k]);
  }
  for (double x : ver.g_norms) {
    if (!std::isfinite(x)) ver.failures.push_back("non-finite norm of g_lambda");
  }

  // Estimate panel on a deterministic grid.
  const double inf = std::numeric_limits<double>::infinity();
  ver.f_lower = ver.ratio_disk_low = ver.ratio_off_low = ver.g_disk_low = inf;
  const double reach = std::min(params.spec.truncation_radius - 1.0, params.required_radius());
  const double step = 0.37;
  const int count = static_cast<int>(std::floor(reach / step));
  for (int j = -count; j <= count; ++j) {
    for (int i = -count; i <= count; ++i) {
      const ComplexPoint z{i * step + 0.013, j * step + 0.007};
      const NodeValues v = model.node(z);
      ver.g_upper = std::max(ver.g_upper, std::abs(v.g) / (1.0 + std::abs(z)));
      std::vector<bool> disk(n_levels, false);
      bool in_disk = false;
      for (std::size_t n = 0; n < n_levels; ++n) {
        disk[n] = std::abs(z - result.u[n]) < 2.0 * std::sqrt(result.u[n]);
        in_disk = in_disk || disk[n];
      }
      if (in_disk) {
        // (1 - z/v)/(1 - z/r) times (z - r)/(z - v) is r/v.
        Complex rest{1.0, 0.0};
        for (std::size_t m = 0; m < n_levels; ++m) {
          rest *= disk[m] ? Complex{model.roots()[m] / model.vs()[m], 0.0}
                          : (1.0 - z / model.vs()[m]) / (1.0 - z / model.roots()[m]);
        }
        ver.ratio_disk_low = std::min(ver.ratio_disk_low, std::abs(rest));
        ver.ratio_disk_high = std::max(ver.ratio_disk_high, std::abs(rest));
      } else {
        ver.ratio_off_low = std::min(ver.ratio_off_low, std::abs(v.ratio));
        ver.ratio_off_high = std::max(ver.ratio_off_high, std::abs(v.ratio));
        if (sigma::dist_to_lattice(z) >= 0.1) {
          ver.f_lower = std::min(ver.f_lower, std::abs(v.f) * std::pow(1.0 + std::abs(z), 4));
        }
      }
    }
  }
  for (std::size_t n = 0; n < n_levels; ++n) {
    for (double rho : {0.0, 0.1, 0.2, 0.3}) {
      for (int k = 0; k < 12; ++k) {
        const ComplexPoint z = result.u[n] + std::polar(rho, 2.0 * kPi * k / 12.0);
        ver.g_disk_low = std::min(ver.g_disk_low, std::sqrt(result.u[n]) * std::abs(model.node(z).g));
      }
    }
  }
  if (!(std::isfinite(ver.g_upper))) ver.failures.push_back("G upper bound not finite");
  if (!(ver.f_lower > 0.0)) ver.failures.push_back("F lower bound constant not positive");
  if (!(ver.ratio_disk_low > 0.0) || !(ver.ratio_off_low > 0.0) || !std::isfinite(ver.ratio_disk_high) ||
      !std::isfinite(ver.ratio_off_high)) {
    ver.failures.push_back("G_1/S ratio bounds degenerate");
  }
  if (!(ver.g_disk_low > 0.0)) ver.failures.push_back("G lower bound on D(u_n, 1/3) not positive");

  ver.lambda_min_modulus = inf;
  for (ComplexPoint z : result.lambda1) ver.lambda_min_modulus = std::min(ver.lambda_min_modulus, std::abs(z));
  for (ComplexPoint z : result.lambda2) ver.lambda_min_modulus = std::min(ver.lambda_min_modulus, std::abs(z));
  if (ver.lambda_min_modulus < 0.5) ver.failures.push_back("Lambda meets D(0, 1/2)");
  return ver;
}

std::vector<OrthogonalityEntry> myex_orthogonality(const ConstructionResult& result, int n_max, int k_cut,
                                                   const QuadratureSpec& spec) {
  const Model& model = *result.model;
  const int n_levels = static_cast<int>(result.u.size());
  if (n_max < 0 || n_max > 4) throw DomainError("myex_orthogonality: n_max must lie in [0, 4]");
  if (k_cut < 1 || k_cut > n_levels) throw DomainError("myex_orthogonality: k_cut must lie in [1, N]");
  const std::size_t powers = static_cast<std::size_t>(n_max) + 1;
  const std::size_t levels = static_cast<std::size_t>(n_levels);
  const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> out) {
    const NodeValues v = model.node(z);
    Complex tail{1.0, 0.0};
    for (int m = k_cut; m < n_levels; ++m) tail *= 1.0 - z / model.vs()[static_cast<std::size_t>(m)];
    Complex base = tail * v.g2;
    const Complex ch = std::conj(v.h);
    const Complex cs = std::conj(v.sigma3);
    for (std::size_t n = 0; n < powers; ++n) {
      out[2 * n] = base * ch;
      out[2 * n + 1] = base * cs;
      base *= z;
    }
    for (std::size_t m = 0; m < levels; ++m) out[2 * powers + m] = model.weighted_g_v(m, z, v) * ch;
  };
  const std::vector<QuadratureResult> q = integrate_plane(integrand, 2 * powers + levels, spec);

  std::vector<OrthogonalityEntry> out;
  for (std::size_t n = 0; n < powers; ++n) {
    OrthogonalityEntry e;
    e.power = static_cast<int>(n);
    e.cut = k_cut;
    e.value = q[2 * n].value;
    e.error_estimate = q[2 * n].error_estimate;
    e.control = std::abs(q[2 * n + 1].value);
    if (static_cast<int>(n) < k_cut) {
      // z^n / p_k(z) = prod_{m<=k}(-v_m) sum_m r_m/(z - v_m).
      Complex scale{1.0, 0.0};
      for (int m = 0; m < k_cut; ++m) scale *= -model.vs()[static_cast<std::size_t>(m)];
      Complex acc{0.0, 0.0};
      for (int m = 0; m < k_cut; ++m) {
        const double vm = model.vs()[static_cast<std::size_t>(m)];
        double r = std::pow(vm, static_cast<double>(n));
        for (int j = 0; j < k_cut; ++j) {
          if (j != m) r /= vm - model.vs()[static_cast<std::size_t>(j)];
        }
        acc += r * q[2 * powers + static_cast<std::size_t>(m)].value;
      }
      e.predicted_available = true;
      e.predicted = scale * acc;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace fockgabor::construction
