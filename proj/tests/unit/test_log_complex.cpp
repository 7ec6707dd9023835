#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fockgabor/errors.hpp"
#include "fockgabor/log_complex.hpp"

using namespace fockgabor;

TEST_SUITE("log_complex") {
  TEST_CASE("product of i with itself is -1") {
    const LogComplex i = LogComplex::from_polar(0.0, kPi / 2);
    const std::vector<LogComplex> v{i, i};
    const LogComplex p = log_combine(v, CombineOp::product);
    CHECK(p.log_mag() == 0.0);
    CHECK(std::abs(p.phase()) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(std::abs(p.to_complex() - Complex(-1.0, 0.0)) < 1e-15);
  }

  TEST_CASE("empty product is one") {
    const LogComplex p = log_combine({}, CombineOp::product);
    CHECK(p.log_mag() == 0.0);
    CHECK(p.phase() == 0.0);
  }

  TEST_CASE("quotient of identical values is one") {
    const LogComplex a = LogComplex::from_complex({3.0, -4.0});
    const std::vector<LogComplex> v{a, a};
    const LogComplex q = log_combine(v, CombineOp::quotient);
    CHECK(q.log_mag() == 0.0);
    CHECK(q.phase() == 0.0);
  }

  TEST_CASE("quotient by zero is a domain error") {
    const std::vector<LogComplex> v{LogComplex::one(), LogComplex::zero()};
    CHECK_THROWS_AS(log_combine(v, CombineOp::quotient), DomainError);
    CHECK_THROWS_AS(LogComplex::one() / LogComplex::zero(), DomainError);
  }

  TEST_CASE("log_sum examples") {
    const std::vector<LogComplex> cancel{LogComplex::from_complex(1.0), LogComplex::from_complex(-1.0)};
    CHECK(log_sum(cancel).is_zero());

    const std::vector<LogComplex> big{LogComplex::from_polar(100.0, 0.0), LogComplex::from_polar(100.0, 0.0)};
    const LogComplex twice = log_sum(big);
    CHECK(twice.log_mag() == doctest::Approx(100.0 + std::log(2.0)).epsilon(1e-15));
    CHECK(twice.phase() == 0.0);

    const std::vector<LogComplex> diag{LogComplex::from_complex(1.0), LogComplex::from_complex({0.0, 1.0})};
    const LogComplex d = log_sum(diag);
    CHECK(d.log_mag() == doctest::Approx(std::log(std::sqrt(2.0))).epsilon(1e-15));
    CHECK(d.phase() == doctest::Approx(kPi / 4).epsilon(1e-15));

    CHECK(log_sum(std::vector<LogComplex>{LogComplex::zero(), LogComplex::zero()}).is_zero());
  }

  TEST_CASE("log_sum keeps cancellation relative to the largest term") {
    const double eps = 1e-10;
    const std::vector<LogComplex> v{LogComplex::from_polar(300.0, 0.0),
                                    LogComplex::from_polar(300.0 + std::log1p(eps), kPi)};
    const LogComplex s = log_sum(v);
    // e^300 (1 - (1 + eps)) = -eps e^300
    CHECK(s.log_mag() == doctest::Approx(300.0 + std::log(eps)).epsilon(1e-5));
    CHECK(std::abs(s.phase()) == doctest::Approx(kPi));
  }

  TEST_CASE("round trip through complex") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-700.0, 700.0);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    for (int k = 0; k < 1000; ++k) {
      const double lm = mag(rng);
      const double p = ph(rng);
      const LogComplex a = LogComplex::from_polar(lm, p);
      const Complex scaled = a.to_complex_scaled(lm);
      const LogComplex b = LogComplex::from_complex(scaled).scaled(lm);
      CHECK(std::abs(b.log_mag() - lm) <= 1e-14 * std::max(1.0, std::abs(lm)));
      CHECK(std::abs(normalize_phase(b.phase() - p)) <= 1e-14);
      if (std::abs(lm) < 600.0) {
        const Complex w = a.to_complex();
        const LogComplex c = LogComplex::from_complex(w);
        CHECK(std::abs(c.to_complex() - w) <= 1e-14 * std::abs(w));
      }
    }
  }

  TEST_CASE("product and quotient match complex arithmetic") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int k = 0; k < 200; ++k) {
      const Complex x{n(rng), n(rng)};
      const Complex y{n(rng), n(rng)};
      const LogComplex lx = LogComplex::from_complex(x);
      const LogComplex ly = LogComplex::from_complex(y);
      CHECK(std::abs((lx * ly).to_complex() - x * y) <= 1e-13 * std::abs(x * y));
      CHECK(std::abs((lx / ly).to_complex() - x / y) <= 1e-13 * std::abs(x / y));
      CHECK((lx * ly).log_mag() == doctest::Approx(lx.log_mag() + ly.log_mag()).epsilon(1e-15));
    }
  }

  TEST_CASE("phase helpers") {
    CHECK(normalize_phase(3 * kPi) == doctest::Approx(kPi));
    CHECK(normalize_phase(-kPi) == doctest::Approx(kPi));
    CHECK(unit_phasor(kPi / 2) == Complex(0.0, 1.0));
    CHECK(unit_phasor(kPi) == Complex(-1.0, 0.0));
    CHECK(LogComplex::zero().conj().is_zero());
    CHECK_THROWS_AS(require_finite({std::nan(""), 0.0}, "test"), DomainError);
  }
}
