#include <cmath>
#include <random>

#include "doctest.h"
#include "fockgabor/errors.hpp"
#include "fockgabor/fock.hpp"
#include "fockgabor/weierstrass.hpp"

using namespace fockgabor;
using namespace fockgabor::fock;

namespace {

// e^{pi conj(lambda) z - pi|lambda|^2/2 - pi|z|^2/2}, evaluated directly.
Complex normalized_kernel_oracle(ComplexPoint lambda, ComplexPoint z) {
  return std::exp(kPi * std::conj(lambda) * z - kPi * std::norm(lambda) / 2 - kPi * std::norm(z) / 2);
}

FockFunction nk(ComplexPoint c) { return kernel_function({c, true}); }

const double kRoot4 = std::pow(2.0, 0.25);

}  // namespace

TEST_SUITE("fock") {
  TEST_CASE("kernel evaluation examples") {
    CHECK(kernel_weighted_eval({0.0, true}, 0.0).to_complex() == Complex(1.0, 0.0));
    const LogComplex at = kernel_weighted_eval({0.0, true}, {1.5, -2.0});
    CHECK(at.log_mag() == doctest::Approx(-kPi * 6.25 / 2));
    CHECK(at.phase() == 0.0);
    const Complex v = kernel_weighted_eval({1.0, true}, {0.0, 1.0}).to_complex();
    CHECK(std::abs(v - Complex(-std::exp(-kPi), 0.0)) <= 1e-15);
    CHECK(std::abs(v - normalized_kernel_oracle(1.0, {0.0, 1.0})) <= 1e-15);
  }

  TEST_CASE("kernel evaluation against the direct formula") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
      const ComplexPoint lambda{u(rng), u(rng)};
      const ComplexPoint z{u(rng), u(rng)};
      const Complex oracle = normalized_kernel_oracle(lambda, z);
      CHECK(std::abs(kernel_weighted_eval({lambda, true}, z).to_complex() - oracle) <= 1e-13);
      const LogComplex raw = kernel_weighted_eval({lambda, false}, z);
      CHECK(raw.log_mag() == doctest::Approx(std::log(std::abs(oracle)) + kPi * std::norm(lambda) / 2));
    }
  }

  TEST_CASE("closed-form inner products") {
    CHECK(std::abs(inner_product_closed_form(nk({1.0, 2.0}), nk({1.0, 2.0})) - 1.0) <= 1e-15);
    const FockFunction k1 = kernel_function({1.0, false});
    const FockFunction ki = kernel_function({{0.0, 1.0}, false});
    CHECK(std::abs(inner_product_closed_form(k1, ki) - Complex(-1.0, 0.0)) <= 1e-12);
    const Complex small = inner_product_closed_form(nk(1.0), nk({0.0, 1.0}));
    CHECK(std::abs(small - Complex(-std::exp(-kPi), 0.0)) <= 1e-15);
  }

  TEST_CASE("kernel overlap magnitude") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
      const ComplexPoint a{u(rng), u(rng)};
      const ComplexPoint b{u(rng), u(rng)};
      const double expected = std::exp(-kPi * std::norm(a - b) / 2);
      CHECK(std::abs(std::abs(inner_product_closed_form(nk(a), nk(b))) - expected) <= 1e-10 * expected);
    }
  }

  TEST_CASE("closed form without a decomposition is unsupported") {
    const FockFunction bare("bare", [](ComplexPoint z) { return kernel_weighted_eval({0.0, true}, z); });
    CHECK_THROWS_AS(inner_product_closed_form(bare, bare), UnsupportedMethod);
  }

  TEST_CASE("sigma_3 against a kernel, both paths") {
    const FockFunction s3 = sigma3_function();
    const FockFunction k8 = nk(8.0);
    const Complex closed = inner_product_closed_form(s3, k8);
    CHECK(std::abs(closed - sigma::sigma3_weighted(8.0).to_complex()) <= 1e-15);
    const QuadratureResult q = inner_product_quadrature(s3, k8, suggested_spec(s3, k8));
    CHECK(std::abs(q.value - closed) <= 1e-6);
  }

  TEST_CASE("reproducing property by quadrature") {
    const FockFunction pair = linear_combination("pair", {{1.0, nk({0.5, 0.0})}, {Complex(0.0, -0.5), nk({-1.0, 1.0})}});
    const FockFunction s3 = sigma3_function();
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (const FockFunction& f : {pair, s3}) {
      for (int k = 0; k < 3; ++k) {
        const ComplexPoint lambda{u(rng), u(rng)};
        QuadratureSpec s;
        s.truncation_radius = 10.0;
        s.step = 0.05;
        const QuadratureResult q = inner_product_quadrature(f, nk(lambda), s);
        CHECK(std::abs(q.value - f.weighted_value(lambda)) <= std::max(q.error_estimate, 1e-12));
      }
    }
  }

  TEST_CASE("norms") {
    QuadratureSpec s;
    s.truncation_radius = 8.0;
    CHECK(norm(nk(0.0), s) == doctest::Approx(1.0).epsilon(1e-8));
    const double n1 = norm(kernel_function({1.0, false}), QuadratureSpec::covering(std::vector<ComplexPoint>{1.0}));
    CHECK(std::abs(n1 / std::exp(kPi / 2) - 1.0) <= 1e-6);
    CHECK(std::exp(kPi / 2) == doctest::Approx(4.810477).epsilon(1e-6));
    const FockFunction zero = linear_combination("zero", {{1.0, nk({1.0, 1.0})}, {-1.0, nk({1.0, 1.0})}});
    CHECK(norm(zero, s) <= 1e-12);
  }

  TEST_CASE("Gabor atoms map to conjugate-centred kernels") {
    const auto center = [](const GaborAtom& a) { return bargmann_gabor(a).decomposition()->terms.at(0).center; };
    CHECK(center({0.0, 0.0}) == ComplexPoint(0.0, 0.0));
    CHECK(center({1.0, 0.0}) == ComplexPoint(1.0, 0.0));
    CHECK(center({0.0, 1.0}) == ComplexPoint(0.0, -1.0));
  }

  TEST_CASE("numeric Bargmann transform") {
    const Complex at0 = bargmann_numeric(gabor_signal({0.0, 0.0}), 0.0).to_complex();
    CHECK(std::abs(at0 - 1.0 / kRoot4) <= 1e-12);
    CHECK(1.0 / kRoot4 == doctest::Approx(0.840896).epsilon(1e-6));
    const Complex at1 = bargmann_numeric(gabor_signal({1.0, 0.0}), 1.0).to_complex();
    CHECK(std::abs(at1 - bargmann_gabor({1.0, 0.0}).weighted_value(1.0) / kRoot4) <= 1e-8);
    for (const GaborAtom a : {GaborAtom{0.5, -1.0}, GaborAtom{-2.0, 1.3}}) {
      for (const ComplexPoint z : {ComplexPoint{0.2, 0.4}, ComplexPoint{-1.0, 1.5}, ComplexPoint{2.0, -0.7}}) {
        const Complex numeric = kRoot4 * bargmann_numeric(gabor_signal(a), z).to_complex();
        CHECK(std::abs(numeric - bargmann_gabor(a).weighted_value(z)) <= 1e-6);
      }
    }
    CHECK_THROWS_AS(bargmann_numeric(gabor_signal({0.0, 0.0}), {25.0, 0.0}), DomainError);
  }

  TEST_CASE("unitarity on a Gabor pair") {
    const GaborAtom f{0.0, 0.0};
    const GaborAtom g{1.0, 1.0};
    const Complex fock_side = inner_product_closed_form(bargmann_gabor(f), bargmann_gabor(g)) / std::sqrt(2.0);
    const Complex l2_side = l2_inner_product(gabor_signal(f), gabor_signal(g));
    CHECK(std::abs(fock_side - l2_side) <= 1e-6);
  }
}
