#include "fockgabor/weierstrass.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "fockgabor/errors.hpp"

namespace fockgabor::sigma {

namespace {

// Lattice points with |l| <= kNearRadius enter the product explicitly; the
// rest enter through the power sums.
constexpr int kNearRadiusSquared = 9;
// Series terms zeta^{4j}, j = 1..kSeriesTerms; enough for |zeta| <= 1.6.
constexpr int kSeriesTerms = 16;
// Beyond this radius the unreduced evaluator switches to the literal product.
constexpr double kSeriesRadius = 1.6;

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

struct Reduced {
  LatticeIndex omega;
  Complex zeta;
  // Weighted sigma = zeta * exp(log_rest).
  Complex log_rest;
};

}  // namespace

struct SigmaTables {
  std::vector<Complex> near_inverse;
  // series[j-1] = P_{4j} / (4j).
  std::array<double, kSeriesTerms> series{};
};

namespace {

Complex log_s(Complex zeta, const SigmaTables& t) {
  Complex prod{1.0, 0.0};
  for (Complex inv : t.near_inverse) prod *= 1.0 - zeta * inv;
  const Complex w = zeta * zeta * zeta * zeta;
  Complex acc{0.0, 0.0};
  for (int j = kSeriesTerms; j >= 1; --j) acc = acc * w + t.series[j - 1];
  acc *= w;
  return std::log(prod) - acc;
}

// log of (1 - z/l) e^{z/l + z^2/(2 l^2)} without cancellation for small z/l.
Complex log_factor(Complex x) {
  if (std::abs(x) < 0.1) {
    Complex term = x * x * x;
    Complex acc{0.0, 0.0};
    for (int k = 3; k < 40; ++k) {
      acc -= term / static_cast<double>(k);
      term *= x;
      if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  return std::log(1.0 - x) + x + 0.5 * x * x;
}

// Literal truncated product with the factor of omega kept out:
// weighted sigma = (z - omega) * exp(result).
Complex literal_log_rest(ComplexPoint z, LatticeIndex omega, double radius) {
  const int r = static_cast<int>(std::floor(radius));
  const double rr = radius * radius;
  Compensated re;
  Compensated im;
  for (int m = -r; m <= r; ++m) {
    for (int n = -r; n <= r; ++n) {
      if ((m == 0 && n == 0) || static_cast<double>(m * m + n * n) > rr) continue;
      if (m == omega.m && n == omega.n) continue;
      const Complex x = z / Complex(m, n);
      const Complex v = log_factor(x);
      re.add(v.real());
      im.add(v.imag());
    }
  }
  Complex out{re.value(), im.value()};
  if (!omega.is_origin()) {
    const Complex w = omega.point();
    out += std::log(z) + std::log(-1.0 / w) + z / w + z * z / (2.0 * w * w);
  }
  return out - kPi * std::norm(z) / 2.0;
}

Reduced reduce(ComplexPoint z, const SigmaConfig& cfg) {
  require_finite(z, "sigma");
  Reduced r;
  r.omega = nearest_lattice_point(z);
  r.zeta = z - r.omega.point();
  const SigmaTables& t = *cfg.tables;
  if (!cfg.use_reduction) {
    if (std::abs(z) <= kSeriesRadius && r.omega.is_origin()) {
      r.log_rest = log_s(z, t) - kPi * std::norm(z) / 2.0;
    } else if (std::abs(z) <= kSeriesRadius) {
      // Series is valid but the nearest zero is not the origin.
      const Complex full = std::log(z) + log_s(z, t);
      r.log_rest = full - std::log(r.zeta) - kPi * std::norm(z) / 2.0;
      if (r.zeta == Complex{0.0, 0.0}) r.log_rest = literal_log_rest(z, r.omega, cfg.product_truncation_radius);
    } else {
      r.log_rest = literal_log_rest(z, r.omega, cfg.product_truncation_radius);
    }
    return r;
  }
  const double m = r.omega.m;
  const double n = r.omega.n;
  const Complex zeta = r.zeta;
  const Complex e1 = cfg.eta_1 - kPi;
  const Complex e2 = cfg.eta_i + Complex(0.0, kPi);
  const Complex omega_bar{m, -n};
  const long long parity = (static_cast<long long>(r.omega.m) * r.omega.n + r.omega.m + r.omega.n) & 1LL;
  Complex rest = log_s(zeta, t) - kPi * std::norm(zeta) / 2.0;
  rest += Complex(0.0, kPi * (omega_bar * zeta).imag());
  if (parity != 0) rest += Complex(0.0, kPi);
  rest += e1 * (m * zeta + Complex(0.0, m * n) + m * m / 2.0);
  rest += e2 * (n * zeta + Complex(0.0, n * n / 2.0));
  r.log_rest = rest;
  return r;
}

LogComplex finish(Complex log_value, ComplexPoint z, bool real_on_axis) {
  LogComplex v = LogComplex::from_log(log_value);
  if (real_on_axis && z.imag() == 0.0 && !v.is_zero()) {
    const double phase = std::abs(v.phase()) < kPi / 2 ? 0.0 : kPi;
    v = LogComplex::from_polar(v.log_mag(), phase);
  }
  return v;
}

double g4_exact() {
  const double pi4 = kPi * kPi * kPi * kPi;
  double acc = 0.0;
  for (int n = 12; n >= 1; --n) {
    const double s = std::sinh(kPi * n);
    const double s2 = 1.0 / (s * s);
    acc += s2 * s2 + (2.0 / 3.0) * s2;
  }
  return pi4 / 45.0 + 2.0 * pi4 * acc;
}

std::shared_ptr<const SigmaTables> build_tables(double radius, bool tail_correction) {
  auto t = std::make_shared<SigmaTables>();
  std::array<Compensated, kSeriesTerms> sums;
  Compensated near4;
  for (int m = -3; m <= 3; ++m) {
    for (int n = -3; n <= 3; ++n) {
      const int q = m * m + n * n;
      if (q == 0 || q > kNearRadiusSquared) continue;
      const Complex inv = 1.0 / Complex(m, n);
      t->near_inverse.push_back(inv);
      const Complex inv2 = inv * inv;
      near4.add((inv2 * inv2).real());
    }
  }
  const double outer = tail_correction ? 2.0 * radius : radius;
  const int r = static_cast<int>(std::floor(outer));
  const double rr = radius * radius;
  const double oo = outer * outer;
  for (int m = -r; m <= r; ++m) {
    for (int n = -r; n <= r; ++n) {
      const double q = static_cast<double>(m) * m + static_cast<double>(n) * n;
      if (q <= kNearRadiusSquared || q > oo) continue;
      const Complex inv = 1.0 / Complex(m, n);
      const Complex inv2 = inv * inv;
      const Complex inv4 = inv2 * inv2;
      Complex p = inv4;
      for (int j = 0; j < kSeriesTerms; ++j) {
        // k = 4 is handled exactly below when correcting the tail.
        if (j == 0 && (tail_correction || q > rr)) {
          p *= inv4;
          continue;
        }
        sums[j].add(p.real());
        p *= inv4;
      }
    }
  }
  for (int j = 0; j < kSeriesTerms; ++j) {
    double pk = sums[j].value();
    if (j == 0 && tail_correction) pk = g4_exact() - near4.value();
    t->series[j] = pk / (4.0 * (j + 1));
  }
  return t;
}

}  // namespace

LatticeIndex nearest_lattice_point(ComplexPoint z) {
  return {static_cast<int>(std::round(z.real())), static_cast<int>(std::round(z.imag()))};
}

double dist_to_lattice(ComplexPoint z) { return std::abs(z - nearest_lattice_point(z).point()); }

std::vector<LatticeIndex> lattice_points(double radius, bool include_origin) {
  std::vector<LatticeIndex> out;
  const int r = static_cast<int>(std::floor(radius));
  const double rr = radius * radius;
  for (int m = -r; m <= r; ++m) {
    for (int n = -r; n <= r; ++n) {
      if (m == 0 && n == 0 && !include_origin) continue;
      if (static_cast<double>(m * m + n * n) > rr) continue;
      out.push_back({m, n});
    }
  }
  std::sort(out.begin(), out.end(), [](LatticeIndex a, LatticeIndex b) {
    const int qa = a.m * a.m + a.n * a.n;
    const int qb = b.m * b.m + b.n * b.n;
    if (qa != qb) return qa < qb;
    return std::atan2(a.n, a.m) < std::atan2(b.n, b.m);
  });
  return out;
}

double lattice_g4() { return g4_exact(); }

double SigmaConfig::legendre_residual() const {
  return std::abs(eta_1 * Complex(0.0, 1.0) - eta_i - Complex(0.0, 2.0 * kPi));
}

SigmaConfig make_sigma_config(double product_truncation_radius, bool use_reduction, bool tail_correction) {
  if (!(product_truncation_radius >= 4.0) || !std::isfinite(product_truncation_radius)) {
    throw DomainError("SigmaConfig: product truncation radius must be >= 4");
  }
  SigmaConfig cfg;
  cfg.product_truncation_radius = product_truncation_radius;
  cfg.use_reduction = use_reduction;
  cfg.tail_correction = tail_correction;
  cfg.tables = build_tables(product_truncation_radius, tail_correction);
  const SigmaTables& t = *cfg.tables;
  auto sigma_near = [&t](Complex z) { return z * std::exp(log_s(z, t)); };
  const Complex a{0.25, 0.0};
  const Complex b{0.0, 0.25};
  cfg.eta_1 = std::log(-sigma_near(a + 1.0) / sigma_near(a)) / 0.75;
  cfg.eta_i = std::log(-sigma_near(b + Complex(0.0, 1.0)) / sigma_near(b)) / Complex(0.0, 0.75);
  return cfg;
}

const SigmaConfig& default_sigma_config() {
  static const SigmaConfig cfg = make_sigma_config();
  return cfg;
}

SigmaSample sample_sigma(ComplexPoint z, const SigmaConfig& cfg) {
  const Reduced r = reduce(z, cfg);
  return {z, r.omega, r.zeta, r.log_rest, std::exp(r.log_rest)};
}

LogComplex SigmaSample::weighted() const {
  if (offset == Complex{0.0, 0.0}) return LogComplex::zero();
  return finish(std::log(offset) + log_rest, z, true);
}

LogComplex SigmaSample::quotient(std::span<const LatticeIndex> removed) const {
  bool deflated = false;
  bool real_zeros = true;
  Complex value = log_rest;
  for (LatticeIndex a : removed) {
    if (a.n != 0) real_zeros = false;
    if (a == nearest) {
      deflated = true;
      continue;
    }
    value -= std::log(z - a.point());
  }
  if (!deflated) {
    if (offset == Complex{0.0, 0.0}) return LogComplex::zero();
    value += std::log(offset);
  }
  return finish(value, z, real_zeros);
}

Complex SigmaSample::sigma0_over(LatticeIndex w) const {
  if (nearest.is_origin()) return rest / (z - w.point());
  if (nearest == w) return rest / z;
  return offset * rest / (z * (z - w.point()));
}

LogComplex sigma_weighted(ComplexPoint z, const SigmaConfig& cfg) { return sample_sigma(z, cfg).weighted(); }

LogComplex sigma_quotient_weighted(ComplexPoint z, std::span<const LatticeIndex> removed, const SigmaConfig& cfg) {
  return sample_sigma(z, cfg).quotient(removed);
}

LogComplex sigma0_weighted(ComplexPoint z, const SigmaConfig& cfg) {
  static constexpr std::array<LatticeIndex, 1> kZeros{{{0, 0}}};
  return sigma_quotient_weighted(z, kZeros, cfg);
}

LogComplex sigma3_weighted(ComplexPoint z, const SigmaConfig& cfg) {
  static constexpr std::array<LatticeIndex, 4> kZeros{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}};
  return sigma_quotient_weighted(z, kZeros, cfg);
}

LogComplex sigma_prime_at_lattice(LatticeIndex w, const SigmaConfig& cfg) {
  const std::array<LatticeIndex, 1> zero{w};
  return sigma_quotient_weighted(w.point(), zero, cfg);
}

LogComplex sigma0_prime_at_lattice(LatticeIndex w, const SigmaConfig& cfg) {
  if (w.is_origin()) throw DomainError("sigma0_prime_at_lattice: w must be a nonzero lattice point");
  constexpr double h = 1e-5;
  const ComplexPoint c = w.point();
  const LogComplex plus = sigma0_weighted(c + h, cfg);
  const LogComplex minus = sigma0_weighted(c - h, cfg);
  // Bring both samples to the common weight e^{-pi|w|^2/2}.
  const double shift_plus = kPi * (2.0 * h * c.real() + h * h) / 2.0;
  const double shift_minus = kPi * (-2.0 * h * c.real() + h * h) / 2.0;
  const double scale = plus.log_mag();
  const Complex d = plus.to_complex_scaled(scale - shift_plus) - minus.to_complex_scaled(scale - shift_minus);
  return LogComplex::from_complex(d / (2.0 * h)).scaled(scale);
}

LogComplex sigma_truncated_product_weighted(ComplexPoint z, double radius) {
  require_finite(z, "sigma_truncated_product_weighted");
  if (z == Complex{0.0, 0.0}) return LogComplex::zero();
  const Complex rest = literal_log_rest(z, {0, 0}, radius);
  return LogComplex::from_log(std::log(z) + rest);
}

SigmaBound check_sigma_bound(std::size_t sample_count, const SigmaConfig& cfg, std::uint64_t seed) {
  if (sample_count < 100) throw DomainError("check_sigma_bound: need at least 100 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SigmaBound b;
  b.c_low = std::numeric_limits<double>::infinity();
  b.c_high = 0.0;
  while (b.samples < sample_count) {
    const double rad = 10.0 * std::sqrt(unit(rng));
    const double theta = 2.0 * kPi * unit(rng);
    const ComplexPoint z = std::polar(rad, theta);
    const double d = dist_to_lattice(z);
    if (d == 0.0) continue;
    const double ratio = sigma_weighted(z, cfg).abs() / d;
    b.c_low = std::min(b.c_low, ratio);
    b.c_high = std::max(b.c_high, ratio);
    ++b.samples;
  }
  return b;
}

}  // namespace fockgabor::sigma
