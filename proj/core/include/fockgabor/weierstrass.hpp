#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fockgabor/log_complex.hpp"

namespace fockgabor::sigma {

// A Gaussian integer m + in.
struct LatticeIndex {
  int m = 0;
  int n = 0;

  ComplexPoint point() const { return {static_cast<double>(m), static_cast<double>(n)}; }
  bool is_origin() const { return m == 0 && n == 0; }
  auto operator<=>(const LatticeIndex&) const = default;
};

// Nearest Gaussian integer (ties rounded away from zero).
LatticeIndex nearest_lattice_point(ComplexPoint z);

// Distance from z to the lattice Z[i].
double dist_to_lattice(ComplexPoint z);

// Nonzero Gaussian integers with |w| <= radius, ordered by (|w|, arg w).
std::vector<LatticeIndex> lattice_points(double radius, bool include_origin = false);

struct SigmaTables;

// Evaluation data for the Weierstrass sigma function of Z[i].
//
// With tail_correction on, the power sums sum lambda^{-k} that drive the
// product are completed by the exact lattice sum (for k = 4) and by a
// doubled summation radius (for k >= 8), so the evaluator reproduces the
// infinite product rather than the product truncated at
// product_truncation_radius.
struct SigmaConfig {
  double product_truncation_radius = 200.0;
  bool use_reduction = true;
  bool tail_correction = true;
  Complex eta_1{0.0, 0.0};
  Complex eta_i{0.0, 0.0};
  std::shared_ptr<const SigmaTables> tables;

  // |eta_1 * i - eta_i - 2 pi i|.
  double legendre_residual() const;
};

// Builds the tables and derives (eta_1, eta_i) from sigma(z+1)/sigma(z) at
// z = 0.25 and sigma(z+i)/sigma(z) at z = 0.25i.
SigmaConfig make_sigma_config(double product_truncation_radius = 200.0, bool use_reduction = true,
                              bool tail_correction = true);

const SigmaConfig& default_sigma_config();

// Exact lattice sum G_4 = sum over nonzero Gaussian integers of w^{-4}.
double lattice_g4();

// sigma at one point in factored form: the weighted value is
// offset * exp(log_rest), offset = z - nearest.
struct SigmaSample {
  ComplexPoint z{0.0, 0.0};
  LatticeIndex nearest;
  Complex offset{0.0, 0.0};
  Complex log_rest{0.0, 0.0};
  // exp(log_rest).
  Complex rest{0.0, 0.0};

  LogComplex weighted() const;
  // Weighted sigma(z) / prod_j (z - removed[j]), removed distinct lattice points.
  LogComplex quotient(std::span<const LatticeIndex> removed) const;
  // As quotient({0}) / (z - w): sigma_0(z)/(z - w) weighted, w != 0.
  Complex sigma0_over(LatticeIndex w) const;
};

SigmaSample sample_sigma(ComplexPoint z, const SigmaConfig& cfg = default_sigma_config());

// sigma(z) e^{-pi|z|^2/2}.
LogComplex sigma_weighted(ComplexPoint z, const SigmaConfig& cfg = default_sigma_config());

// sigma(z) e^{-pi|z|^2/2} / prod_j (z - removed[j]) for distinct lattice
// points; the removable singularities are resolved by dropping the factor
// of the nearest lattice point instead of dividing.
LogComplex sigma_quotient_weighted(ComplexPoint z, std::span<const LatticeIndex> removed,
                                   const SigmaConfig& cfg = default_sigma_config());

// sigma_0 = sigma / z.
LogComplex sigma0_weighted(ComplexPoint z, const SigmaConfig& cfg = default_sigma_config());

// sigma_3 = sigma / (z (z-1) (z-2) (z-3)).
LogComplex sigma3_weighted(ComplexPoint z, const SigmaConfig& cfg = default_sigma_config());

// sigma_0'(w) e^{-pi|w|^2/2} by a central difference of step 1e-5.
LogComplex sigma0_prime_at_lattice(LatticeIndex w, const SigmaConfig& cfg = default_sigma_config());

// sigma'(w) e^{-pi|w|^2/2} from the product with the factor (z - w) removed.
LogComplex sigma_prime_at_lattice(LatticeIndex w, const SigmaConfig& cfg = default_sigma_config());

// The literal product z prod_{0<|l|<=radius} (1 - z/l) e^{z/l + z^2/(2 l^2)},
// weighted. Slow; intended as a reference.
LogComplex sigma_truncated_product_weighted(ComplexPoint z, double radius);

struct SigmaBound {
  double c_low = 0.0;
  double c_high = 0.0;
  std::size_t samples = 0;
};

// Extremes of |sigma(z)| e^{-pi|z|^2/2} / dist(z, Z) over random z, |z| <= 10.
SigmaBound check_sigma_bound(std::size_t sample_count, const SigmaConfig& cfg = default_sigma_config(),
                             std::uint64_t seed = 20240601);

}  // namespace fockgabor::sigma
