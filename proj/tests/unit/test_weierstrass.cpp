#include <cmath>
#include <random>

#include "doctest.h"
#include "fockgabor/weierstrass.hpp"

using namespace fockgabor;
using namespace fockgabor::sigma;

namespace {

// Weighted sigma_3(0.5), frozen from the evaluator and checked below against
// the literal product.
constexpr double kSigma3Half = -0.34208104044183785;

// sigma_0'(w) e^{-pi|w|^2/2} by Richardson-extrapolated central differences of
// the weighted sigma_0, unweighting each sample relative to w.
Complex sigma0_prime_oracle(LatticeIndex w) {
  const ComplexPoint p = w.point();
  auto unweighted = [&](ComplexPoint z) {
    return sigma0_weighted(z).to_complex() * std::exp(kPi * (std::norm(z) - std::norm(p)) / 2);
  };
  auto diff = [&](double h) { return (unweighted(p + h) - unweighted(p - h)) / (2 * h); };
  const double h = 1e-3;
  return (4.0 * diff(h / 2) - diff(h)) / 3.0;
}

}  // namespace

TEST_SUITE("weierstrass") {
  TEST_CASE("distance to the lattice") {
    CHECK(dist_to_lattice(0.5) == doctest::Approx(0.5));
    CHECK(dist_to_lattice({0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)));
    CHECK(dist_to_lattice({3.0, 4.0}) == 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int k = 0; k < 1000; ++k) CHECK(dist_to_lattice({u(rng), u(rng)}) <= std::sqrt(0.5) + 1e-15);
  }

  TEST_CASE("lattice point enumeration") {
    const std::vector<LatticeIndex> pts = lattice_points(1.5);
    CHECK(pts.size() == 8);
    CHECK(std::abs(pts.front().point()) == 1.0);
    CHECK(lattice_points(1.5, true).front().is_origin());
    for (std::size_t k = 1; k < pts.size(); ++k) CHECK(std::abs(pts[k - 1].point()) <= std::abs(pts[k].point()));
  }

  TEST_CASE("zeros and the derivative at the origin") {
    CHECK(sigma_weighted(0.0).is_zero());
    CHECK(sigma_weighted({3.0, 4.0}).is_zero());
    CHECK(sigma3_weighted(4.0).is_zero());
    CHECK(std::abs(sigma0_weighted(0.0).to_complex() - 1.0) <= 1e-15);
    const double h = 1e-5;
    const Complex slope = sigma_weighted(h).to_complex() * std::exp(kPi * h * h / 2) / h;
    CHECK(std::abs(slope - 1.0) <= 1e-4);
  }

  TEST_CASE("quasi-period constants") {
    const SigmaConfig& cfg = default_sigma_config();
    CHECK(cfg.legendre_residual() <= 1e-12);
    CHECK(std::abs(cfg.eta_1 - Complex(kPi, 0.0)) <= 1e-10);
    CHECK(std::abs(cfg.eta_i - Complex(0.0, -kPi)) <= 1e-10);
  }

  TEST_CASE("quasi-periodicity of the unreduced product") {
    const SigmaConfig cfg = make_sigma_config(200.0, false);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 20; ++k) {
      const ComplexPoint z{u(rng), u(rng)};
      for (const auto& [step, eta] : {std::pair<Complex, Complex>{1.0, cfg.eta_1}, {Complex(0.0, 1.0), cfg.eta_i}}) {
        const Complex lhs = sigma_weighted(z + step, cfg).to_complex();
        const Complex rhs = -sigma_weighted(z, cfg).to_complex() *
                            std::exp(eta * (z + step / 2.0) - kPi * (std::norm(z + step) - std::norm(z)) / 2);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
      }
    }
  }

  TEST_CASE("oddness and realness") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int k = 0; k < 100; ++k) {
      const ComplexPoint z{u(rng), u(rng)};
      const Complex a = sigma_weighted(z).to_complex();
      const Complex b = sigma_weighted(-z).to_complex();
      CHECK(std::abs(a + b) <= 1e-10 * std::abs(a));
      const LogComplex r = sigma_weighted(u(rng));
      CHECK(std::min(std::abs(r.phase()), std::abs(std::abs(r.phase()) - kPi)) <= 1e-10);
    }
  }

  TEST_CASE("sigma_3(1/2) against the literal product") {
    const double poly = 0.5 * -0.5 * -1.5 * -2.5;
    const double evaluator = sigma3_weighted(0.5).to_complex().real();
    const double product = sigma_truncated_product_weighted(0.5, 400.0).to_complex().real() / poly;
    CHECK(std::abs(sigma3_weighted(0.5).to_complex().imag()) <= 1e-15);
    CHECK(std::abs(evaluator - product) <= 1e-9 * std::abs(product));
    CHECK(evaluator == doctest::Approx(kSigma3Half).epsilon(1e-13));
  }

  TEST_CASE("deflation near removed zeros is continuous") {
    for (double a : {0.0, 1.0, 2.0, 3.0}) {
      const Complex inside = sigma3_weighted(a + 5e-4).to_complex();
      const Complex outside = sigma3_weighted(a + 2e-3).to_complex();
      CHECK(std::abs(inside - outside) <= 1e-2 * std::abs(outside));
      CHECK(std::abs(inside) > 0.0);
    }
  }

  TEST_CASE("sigma_0 prime at lattice points") {
    const Complex d1 = sigma0_prime_at_lattice({1, 0}).to_complex();
    CHECK(std::abs(d1) >= 0.1);
    CHECK(std::abs(d1) <= 10.0);
    CHECK(std::abs(d1 - sigma0_prime_oracle({1, 0})) <= 1e-7);
    CHECK(std::abs(d1 - Complex(-1.0, 0.0)) <= 1e-8);
    const Complex a = sigma0_prime_at_lattice({1, 2}).to_complex();
    const Complex b = sigma0_prime_at_lattice({1, -2}).to_complex();
    CHECK(std::abs(a - std::conj(b)) <= 1e-8);
    const double r1 = sigma0_prime_at_lattice({2, 1}).abs();
    const double r2 = sigma0_prime_at_lattice({-1, 2}).abs();
    CHECK(std::abs(r1 - r2) <= 1e-8);
    for (LatticeIndex w : lattice_points(6.0)) {
      const Complex s0 = sigma0_prime_at_lattice(w).to_complex();
      const Complex s = sigma_prime_at_lattice(w).to_complex() / w.point();
      CHECK(std::abs(s0 - s) <= 1e-7 * std::abs(s));
    }
  }

  TEST_CASE("two-sided bound sweep") {
    const SigmaBound b = check_sigma_bound(200);
    CHECK(b.samples == 200);
    CHECK(b.c_low > 0.05);
    CHECK(b.c_high < 20.0);
    const ComplexPoint deep{0.5, 0.5};
    const double ratio = sigma_weighted(deep).abs() / dist_to_lattice(deep);
    CHECK(ratio > 0.05);
    CHECK(ratio < 20.0);
    const double shifted = sigma_weighted(deep + 1.0).abs() / dist_to_lattice(deep + 1.0);
    CHECK(std::abs(ratio - shifted) <= 1e-8);
    const SigmaBound again = check_sigma_bound(200);
    CHECK(again.c_low == b.c_low);
    CHECK(again.c_high == b.c_high);
  }
}
