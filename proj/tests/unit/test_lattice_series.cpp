#include <cmath>

#include "doctest.h"
#include "fockgabor/errors.hpp"
#include "fockgabor/lattice_series.hpp"

using namespace fockgabor;
using namespace fockgabor::series;
using fock::FockFunction;

namespace {

FockFunction nk(ComplexPoint c) { return fock::kernel_function({c, true}); }

FockFunction sigma0_function() {
  return FockFunction("sigma0", [](ComplexPoint z) { return sigma::sigma0_weighted(z); });
}

// f times prod (z - r).
FockFunction times_linear(const FockFunction& f, std::vector<ComplexPoint> roots) {
  return FockFunction("h2", [f, roots](ComplexPoint z) {
    Complex p{1.0, 0.0};
    for (ComplexPoint r : roots) p *= z - r;
    return f.weighted(z) * LogComplex::from_complex(p);
  });
}

QuadratureSpec window(double radius, double step) {
  QuadratureSpec s;
  s.truncation_radius = radius;
  s.step = step;
  return s;
}

// <h_{2+i}, sigma_3> on [-32, 32]^2 with step 0.025.
const Complex kSigma3B21{-0.010676206219197256, 9.9170897788199255e-10};

}  // namespace

TEST_SUITE("lattice_series") {
  TEST_CASE("interpolation coefficients") {
    CHECK(std::abs(coeff_a(nk({2.0, -1.0}), {2, -1}) - 1.0) <= 1e-15);
    for (LatticeIndex w : sigma::lattice_points(3.0)) CHECK(std::abs(coeff_a(sigma0_function(), w)) == 0.0);
    const Complex a = coeff_a(nk(1.0), {1, 1});
    CHECK(std::abs(a) == doctest::Approx(std::exp(-kPi / 2)).epsilon(1e-14));
    CHECK(std::abs(a - Complex(-std::exp(-kPi / 2), 0.0)) <= 1e-15);
  }

  TEST_CASE("l2 partial sums are nondecreasing") {
    const LatticeCoefficients a = a_coefficients(fock::sigma3_function(), 12.0);
    double prev = 0.0;
    for (double r : {2.0, 4.0, 8.0, 10.0, 12.0}) {
      const double s = a.partial_l2(r);
      CHECK(s >= prev);
      prev = s;
    }
    CHECK(a.partial_l2(12.0) - a.partial_l2(10.0) <= 1e-6);
  }

  TEST_CASE("biorthogonality, closed form and quadrature") {
    const QuadratureSpec s = window(8.0, 0.05);
    for (LatticeIndex v : {LatticeIndex{1, 0}, LatticeIndex{1, 1}, LatticeIndex{-2, 1}}) {
      for (LatticeIndex w : {LatticeIndex{1, 0}, LatticeIndex{0, 2}, LatticeIndex{-2, 1}}) {
        const CoefficientB b = coeff_b(nk(v.point()), w, s);
        const double expected = v == w ? 1.0 : 0.0;
        REQUIRE(b.closed_form.has_value());
        CHECK(std::abs(*b.closed_form - expected) <= 1e-8);
        CHECK(std::abs(b.value - expected) <= 1e-6);
      }
    }
  }

  TEST_CASE("coefficient of sigma_3 at 2+i") {
    const CoefficientB b = coeff_b(fock::sigma3_function(), {2, 1}, window(24.0, 0.05));
    CHECK(std::abs(b.value - kSigma3B21) <= std::max(b.error_estimate, 1e-7));
    CHECK(!b.closed_form.has_value());
  }

  TEST_CASE("biorthogonal function matches its weighted evaluation") {
    const FockFunction h = biorthogonal_function({1, 1});
    for (ComplexPoint z : {ComplexPoint{0.3, 0.2}, ComplexPoint{-1.5, 0.5}}) {
      CHECK(std::abs(h.weighted_value(z) - biorthogonal_weighted({1, 1}, z).to_complex()) <= 1e-15);
    }
    // <k_v, h_v> = 1 is the reproducing property applied to h_v at v.
    CHECK(std::abs(h.weighted_value({1.0, 1.0}) - 1.0) <= 1e-8);
  }

  TEST_CASE("three-zero identity collapses for a lattice kernel") {
    const DivisibleFunction g = shifted_sigma0({0.5, 0.5});
    const IdentityCheck c =
        lemma3_identity(g, {0.5, -0.5}, {1.5, 1.5}, {-1.5, 0.5}, nk({1.0, 1.0}), 12.0, window(8.0, 0.05));
    CHECK(c.gap <= 1e-5);
    const ComplexPoint v{1.0, 1.0};
    const Complex single = g.weighted(v).to_complex() / ((v - ComplexPoint(0.5, -0.5)) * (v - ComplexPoint(1.5, 1.5)) *
                                                         (v - ComplexPoint(-1.5, 0.5)));
    CHECK(std::abs(c.rhs - single) <= 1e-8);
  }

  TEST_CASE("three-zero identity on an off-lattice kernel") {
    const DivisibleFunction g = shifted_sigma0({0.5, 0.5});
    const IdentityCheck c =
        lemma3_identity(g, {1.5, 0.5}, {0.5, 1.5}, {-0.5, 0.5}, nk({0.7, -0.4}), 12.0, window(8.0, 0.05));
    CHECK(c.gap <= 1e-4);
  }

  TEST_CASE("three-zero identity rejects bad zeros") {
    const DivisibleFunction g = shifted_sigma0({0.5, 0.5});
    CHECK_THROWS_AS(lemma3_identity(g, {1.5, 0.5}, {1.5, 0.5}, {-0.5, 0.5}, nk(0.0), 4.0, window(4.0, 0.1)),
                    PreconditionError);
    CHECK_THROWS_AS(lemma3_identity(g, {1.0, 0.0}, {1.5, 0.5}, {-0.5, 0.5}, nk(0.0), 4.0, window(4.0, 0.1)),
                    PreconditionError);
  }

  TEST_CASE("two-sided identity for a lattice kernel") {
    const ComplexPoint mu{0.0, 0.5};
    const IdentityCheck c =
        dople_identity(nk({1.0, 1.0}), times_linear(nk({1.0, -1.0}), {mu}), {0.5, 0.5}, mu, 12.0, window(8.0, 0.05));
    CHECK(c.gap <= 1e-5);
    CHECK_THROWS_AS(dople_identity(nk({1.0, 1.0}), nk({1.0, -1.0}), {0.5, 0.5}, mu, 4.0, window(4.0, 0.1)),
                    PreconditionError);
  }

  TEST_CASE("interpolation identity") {
    const ComplexPoint l3{-0.5, 1.5};
    const ComplexPoint l4{1.5, -0.3};
    const FockFunction h2 = times_linear(nk({2.0, 1.0}), {l3, l4});
    const IdentityCheck c = interp_identity_e2(h2, l3, l4, {0.5, 0.5}, 12.0);
    CHECK(c.gap <= 1e-4);
    const ResidueCheck r = e2_residue(h2, l3, l4, {1, 0});
    CHECK(r.gap <= 1e-6);
    CHECK_THROWS_AS(interp_identity_e2(h2, l3, l4, {1.01, 0.0}, 12.0), PreconditionError);
  }

  TEST_CASE("interpolation identity for sigma_0 has a vanishing lattice side") {
    // Every a_w vanishes, so the lattice side is zero; the right side is
    // 1/((z - l3)(z - l4)), the term the truncated series cannot see.
    const ComplexPoint l3{0.5, 0.5};
    const ComplexPoint l4{1.5, -0.3};
    const ComplexPoint z{0.3, 0.7};
    const IdentityCheck c = interp_identity_e2(sigma0_function(), l3, l4, z, 8.0);
    CHECK(std::abs(c.lhs) == 0.0);
    CHECK(std::abs(c.rhs - 1.0 / ((z - l3) * (z - l4))) <= 1e-10);
  }

  TEST_CASE("b coefficients obey the logarithmic growth bound") {
    const LatticeCoefficients b = b_coefficients(nk({0.5, 0.5}), 6.0, window(8.0, 0.1));
    CHECK(b.kind == CoefficientKind::b);
    CHECK(b.log_growth_constant() < 100.0);
  }
}
