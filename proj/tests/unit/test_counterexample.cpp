#include <cmath>

#include "doctest.h"
#include "fockgabor/counterexample.hpp"
#include "fockgabor/errors.hpp"

using namespace fockgabor;
using namespace fockgabor::construction;

namespace {

const ConstructionResult& base_construction() {
  static const ConstructionResult r = build_construction(ConstructionParams::with_window(8, 3));
  return r;
}

FockFunction nk(ComplexPoint c) { return fock::kernel_function({c, true}); }

}  // namespace

TEST_SUITE("counterexample") {
  TEST_CASE("parameters") {
    const ConstructionParams p = ConstructionParams::with_window(8, 3);
    CHECK(p.u() == std::vector<double>{8.0, 16.0, 32.0});
    CHECK(p.required_radius() == doctest::Approx(32.0 + 2.0 * std::sqrt(32.0) + 8.0));
    CHECK(p.spec.truncation_radius == 52.0);
    p.validate();
    ConstructionParams narrow = p;
    narrow.spec.truncation_radius = 44.0;
    CHECK_THROWS_AS(narrow.validate(), DomainError);
    ConstructionParams small = p;
    small.q = 3;
    CHECK_THROWS_AS(small.validate(), DomainError);
  }

  TEST_CASE("F near the first bump and far away") {
    const FockFunction f = build_F(ConstructionParams::with_window(8, 3));
    const double main_term = (1.0 - std::exp(-kPi / 2)) / std::sqrt(8.0);
    CHECK(std::abs(f.weighted_value(8.0) - main_term) <= 0.01);
    CHECK(main_term == doctest::Approx(0.2801).epsilon(1e-3));
    CHECK(std::abs(f.weighted_value(8.5)) <= 0.05);
    CHECK(std::abs(f.weighted_value({0.0, 20.0})) <= 1e-6);
    for (int k = 0; k < 50; ++k) {
      const double x = -10.0 + 0.9 * k;
      CHECK(std::abs(f.weighted_value(x).imag()) <= 1e-12 * std::max(1e-300, std::abs(f.weighted_value(x))));
    }
    REQUIRE(f.decomposition().has_value());
    CHECK(f.decomposition()->terms.size() == 6);
    CHECK(f.decomposition()->sigma3_coefficient == Complex(1.0, 0.0));
  }

  TEST_CASE("bisection on a symmetric kernel pair") {
    const FockFunction pair = fock::linear_combination("pair", {{1.0, nk(10.0)}, {-1.0, nk(11.0)}});
    CHECK(std::abs(find_beta(pair, 10.0, 1e-12) - 0.5) <= 1e-6);
    CHECK_THROWS_AS(find_beta(nk(10.0), 10.0, 1e-12), PreconditionError);
  }

  TEST_CASE("roots of F") {
    const ConstructionParams p = ConstructionParams::with_window(8, 3);
    const std::vector<double> betas = find_betas(build_F(p), p);
    REQUIRE(betas.size() == 3);
    for (double b : betas) {
      CHECK(b > 1.0 / 3.0);
      CHECK(b < 2.0 / 3.0);
    }
    CHECK(std::abs(betas[0] - 0.5) <= 0.1);
    CHECK(std::abs(betas[2] - 0.5) < std::abs(betas[0] - 0.5));
  }

  TEST_CASE("choice of v_n") {
    const std::vector<double> nine{9.0};
    const std::vector<double> v9 = choose_vs(nine, {});
    CHECK(std::abs(v9[0] - 6.0) >= 0.05 - 1e-12);
    CHECK(std::abs(v9[0] - 6.0) <= 0.05 + 1e-12);
    const std::vector<double> u{8.0, 16.0, 32.0};
    const std::vector<double> v = choose_vs(u, {});
    CHECK(v[0] == doctest::Approx(8.0 - std::sqrt(8.0)).epsilon(1e-15));
    for (std::size_t n = 0; n < u.size(); ++n) CHECK(std::abs(v[n] - (u[n] - std::sqrt(u[n]))) <= 1.0);
    const std::vector<ComplexPoint> avoid{{8.0 - std::sqrt(8.0), 0.0}};
    const std::vector<double> moved = choose_vs(std::vector<double>{8.0}, avoid);
    CHECK(std::abs(moved[0] - avoid[0].real()) >= 0.05 - 1e-12);
  }

  TEST_CASE("H with zero coefficients is sigma_3") {
    const std::vector<double> u{8.0, 16.0};
    const std::vector<double> ds{0.0, 0.0};
    const FockFunction h = build_H(u, ds);
    for (ComplexPoint z : {ComplexPoint{0.5, 0.0}, ComplexPoint{8.0, 1.0}, ComplexPoint{-3.0, 2.5}}) {
      CHECK(h.weighted_value(z) == fock::sigma3_function().weighted_value(z));
    }
  }

  TEST_CASE("one level reduces to a scalar equation") {
    const ConstructionResult r = build_construction(ConstructionParams::with_window(8, 1));
    REQUIRE(r.ds.size() == 1);
    CHECK(std::abs(r.solve.matrix[0][0] * r.ds[0] + r.solve.gamma[0]) <= 1e-14);
  }

  TEST_CASE("base construction") {
    const ConstructionResult& r = base_construction();
    REQUIRE(r.ds.size() == 3);
    for (double d : r.ds) {
      CHECK(d > -1.0);
      CHECK(d < 1.0);
    }
    CHECK(r.solve.dominance < 1.0);
    CHECK(r.solve.residual <= r.params.tol_solve);
    for (double res : r.root_residuals) CHECK(res <= 2.0 * r.params.tol_root);
    CHECK(r.scan.mismatched_cells.empty());
    CHECK(r.lambda1.size() == 3);
    for (ComplexPoint a : r.lambda1) {
      CHECK(sigma::dist_to_lattice(a) >= 0.04);
      for (ComplexPoint b : r.lambda2) CHECK(std::abs(a - b) >= 0.04);
    }
    for (ComplexPoint b : r.lambda2) CHECK(std::abs(r.F.weighted_value(b)) <= 1e-8);
  }

  TEST_CASE("products are normalized at the origin") {
    const Model& m = *base_construction().model;
    CHECK(m.s(0.0) == Complex(1.0, 0.0));
    CHECK(m.g1(0.0) == Complex(1.0, 0.0));
    const double x = 4.0;
    CHECK(std::isfinite(std::abs(m.g1(x) / m.s(x))));
  }

  TEST_CASE("H pairs with g_v through its kernels linearly") {
    // Moving d_1 by t moves <g_{v_1}, H> by t u_1^{-1/3} <g_{v_1}, k_{u_1}>, and
    // <g, k_u> is the weighted value of g at u.
    const ConstructionResult& r = base_construction();
    std::vector<double> ds = r.ds;
    ds[0] += 0.1;
    const FockFunction shifted = build_H(r.u, ds);
    const FockFunction diff = fock::linear_combination("diff", {{1.0, shifted}, {-1.0, r.H}});
    const Complex change = fock::inner_product_closed_form(r.g[0], diff);
    const Complex expected = 0.1 * std::cbrt(1.0 / r.u[0]) * r.g[0].weighted_value(r.u[0]);
    CHECK(std::abs(change - expected) <= 1e-12);
  }
}
