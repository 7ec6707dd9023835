#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fockgabor/errors.hpp"
#include "fockgabor/mixed_gram.hpp"

using namespace fockgabor;
using namespace fockgabor::gram;

namespace {

QuadratureSpec window(double radius, double step = 0.05) {
  QuadratureSpec s;
  s.truncation_radius = radius;
  s.step = step;
  return s;
}

GramMatrix from_eigen(const Eigen::MatrixXcd& a) {
  GramMatrix m;
  m.size = static_cast<std::size_t>(a.rows());
  m.entries.resize(m.size * m.size);
  for (std::size_t i = 0; i < m.size; ++i) {
    for (std::size_t j = 0; j < m.size; ++j) m(i, j) = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return m;
}

Eigen::MatrixXcd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  }
  return a;
}

std::vector<ComplexPoint> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<ComplexPoint> out;
  while (out.size() < n) {
    const ComplexPoint p{u(rng), u(rng)};
    if (sigma::dist_to_lattice(p) >= 0.04) out.push_back(p);
  }
  return out;
}

// One general vector, the normalized kernel at c, next to kernels.
MixedSystemSpec with_general_kernel(std::vector<ComplexPoint> kernels, ComplexPoint c) {
  MixedSystemSpec spec = kernel_system(kernels, {});
  spec.lambda1 = {c};
  spec.vectors.push_back({"g", c, false, 0});
  spec.general_count = 1;
  spec.joint = [c](ComplexPoint z, std::span<Complex> out) {
    out[0] = 3.0 * fock::kernel_weighted_eval({c, true}, z).to_complex();
  };
  spec.validate();
  return spec;
}

}  // namespace

TEST_SUITE("mixed_gram") {
  TEST_CASE("two separated kernels") {
    const std::vector<ComplexPoint> pts{{0.0, 0.0}, {3.0, 0.0}};
    const GramMatrix g = gram_matrix(kernel_system(pts, {2}), 2, window(8.0));
    const double off = std::exp(-9.0 * kPi / 2);
    CHECK(off == doctest::Approx(7.3e-7).epsilon(0.01));
    CHECK(g(0, 0) == Complex(1.0, 0.0));
    CHECK(g(1, 1) == Complex(1.0, 0.0));
    CHECK(std::abs(g(0, 1) - off) <= 1e-18);
    CHECK(std::abs(g(1, 0) - off) <= 1e-18);
  }

  TEST_CASE("general vectors agree with the closed form") {
    const std::vector<ComplexPoint> pts{{0.3, 0.2}, {-0.6, 1.1}};
    const ComplexPoint c{0.9, -0.4};
    const MixedSystemSpec mixed = with_general_kernel(pts, c);
    const GramMatrix g = gram_matrix(mixed, 3, window(8.0));
    std::vector<ComplexPoint> all = pts;
    all.push_back(c);
    const GramMatrix closed = gram_matrix(kernel_system(all, {}), 3, window(8.0));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(g(i, j) - closed(i, j)) <= 1e-8);
    }
    CHECK(g.asymmetry <= 1e-10);
  }

  TEST_CASE("duplicated and single vectors") {
    const std::vector<ComplexPoint> dup{{0.5, 0.5}, {1.5, -0.5}, {0.5, 0.5}};
    const GramReport r = analyse(gram_matrix(kernel_system(dup, {3}), 3, window(8.0)));
    CHECK(r.sigma_min <= 1e-10);
    const std::vector<ComplexPoint> one{{0.5, 0.5}};
    const GramReport s = analyse(gram_matrix(kernel_system(one, {1}), 1, window(8.0)));
    CHECK(s.sigma_min == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("Jacobi SVD against Eigen") {
    for (int n : {1, 2, 5, 12}) {
      const Eigen::MatrixXcd a = random_matrix(n, 100 + static_cast<std::uint64_t>(n));
      const SvdResult r = jacobi_svd(from_eigen(a));
      const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
      REQUIRE(r.singular_values.size() == static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) CHECK(std::abs(r.singular_values[k] - ref(k)) <= 1e-10 * ref(0));
      for (int k = 1; k < n; ++k) CHECK(r.singular_values[k - 1] >= r.singular_values[k]);
    }
  }

  TEST_CASE("Gram spectrum is the square of a factor's singular values") {
    const Eigen::MatrixXcd b = random_matrix(8, 7);
    const Eigen::MatrixXcd gram = b.adjoint() * b;
    const SvdResult r = jacobi_svd(from_eigen(gram));
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(b).singularValues();
    for (int k = 0; k < 8; ++k) CHECK(std::abs(r.singular_values[k] - s(k) * s(k)) <= 1e-9 * s(0) * s(0));
  }

  TEST_CASE("null vector realizes the smallest singular value") {
    const std::vector<ComplexPoint> pts = random_points(8, 21);
    const GramMatrix g = gram_matrix(kernel_system(pts, {8}), 8, window(8.0));
    const GramReport r = analyse(g);
    double norm = 0.0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < r.null_vector.size(); ++i) {
      norm += std::norm(r.null_vector[i]);
      if (std::abs(r.null_vector[i]) > std::abs(r.null_vector[largest])) largest = i;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.null_vector[largest].imag() == 0.0);
    CHECK(r.null_vector[largest].real() > 0.0);
    Complex quad{0.0, 0.0};
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < 8; ++j) quad += r.null_vector[i] * g(i, j) * std::conj(r.null_vector[j]);
    }
    CHECK(std::abs(quad - r.sigma_min) <= 1e-12);
  }

  TEST_CASE("spectrum is invariant under reordering") {
    std::vector<ComplexPoint> pts = random_points(10, 33);
    const GramReport a = analyse(gram_matrix(kernel_system(pts, {}), 10, window(8.0)));
    std::mt19937_64 rng(34);
    std::shuffle(pts.begin(), pts.end(), rng);
    const GramReport b = analyse(gram_matrix(kernel_system(pts, {}), 10, window(8.0)));
    for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(a.singular_values[k] - b.singular_values[k]) <= 1e-12);
  }

  TEST_CASE("appending vectors never raises sigma_min") {
    const MixedSystemSpec spec = kernel_system(random_points(12, 44), {2, 4, 6, 8, 10, 12});
    const std::vector<GramReport> scan = defect_scan(spec, window(8.0));
    REQUIRE(scan.size() == 6);
    for (std::size_t k = 1; k < scan.size(); ++k) CHECK(scan[k].sigma_min <= scan[k - 1].sigma_min * (1 + 1e-12));
    CHECK(scan.back().section_size == 12);
  }

  TEST_CASE("separated control system") {
    const MixedSystemSpec spec = kernel_system(sparse_lattice_points(16), {8, 12, 16});
    for (const GramReport& r : defect_scan(spec, window(8.0))) CHECK(r.sigma_min >= 0.5);
    CHECK(sparse_lattice_points(16).front() == ComplexPoint(0.0, 0.0));
  }

  TEST_CASE("correlation with the section combination is one") {
    const std::vector<ComplexPoint> pts = random_points(6, 55);
    const MixedSystemSpec spec = kernel_system(pts, {6});
    const GramReport r = analyse(gram_matrix(spec, 6, window(8.0)));
    std::vector<std::pair<Complex, fock::FockFunction>> parts;
    for (std::size_t i = 0; i < 6; ++i) parts.push_back({r.null_vector[i], fock::kernel_function({pts[i], true})});
    const fock::FockFunction combo = fock::linear_combination("combo", parts);
    CHECK(null_vector_correlation(r, spec, combo, window(10.0)) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("correlation with a far kernel is small") {
    const std::vector<ComplexPoint> pts{{0.5, 0.5}, {1.5, -0.5}, {-0.5, 1.5}};
    const MixedSystemSpec spec = kernel_system(pts, {3});
    const GramReport r = analyse(gram_matrix(spec, 3, window(8.0)));
    const ComplexPoint far{6.0, 0.0};
    double dist = 1e300;
    for (ComplexPoint p : pts) dist = std::min(dist, std::abs(p - far));
    const double c = null_vector_correlation(r, spec, fock::kernel_function({far, true}), QuadratureSpec::localized(far));
    CHECK(c <= std::exp(-kPi * dist * dist / 2) / std::sqrt(r.sigma_min) * 3.0 + 1e-8);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(kernel_system(random_points(4, 1), {3, 2}), DomainError);
    CHECK_THROWS_AS(kernel_system(random_points(4, 1), {5}), DomainError);
    MixedSystemSpec spec = kernel_system(random_points(4, 1), {});
    spec.lambda1 = {spec.lambda2[0]};
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec.lambda1.clear();
    spec.vectors.push_back({"g", 0.0, false, 0});
    CHECK_THROWS_AS(spec.validate(), DomainError);
  }
}
