#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fockgabor/errors.hpp"
#include "fockgabor/log_complex.hpp"

namespace fockgabor {

class NonFiniteSample : public NumericalFailure {
 public:
  explicit NonFiniteSample(ComplexPoint node);
  ComplexPoint node() const { return node_; }

 private:
  ComplexPoint node_;
};

// Midpoint rule on a uniform grid over the square origin + [-R, R]^2, with
// optional r x r subdivision of cells whose midpoint lies within
// refinement_radius of a center.
//
// Subdivision only pays off for integrands that are not smooth at the
// centers: on smooth integrands a mixed-resolution grid loses the
// superconvergence of the uniform midpoint rule.
struct QuadratureSpec {
  double truncation_radius = 8.0;
  double step = 0.05;
  ComplexPoint origin{0.0, 0.0};
  std::vector<ComplexPoint> centers;
  int refinement_factor = 1;
  double refinement_radius = 0.5;

  void validate() const;
  std::size_t cells_per_side() const;
  // Number of integrand evaluations before the Richardson subsample.
  std::size_t node_count() const;

  // Window around the origin with R = max(8, max |c| + 6).
  static QuadratureSpec covering(std::span<const ComplexPoint> points, double step = 0.05);
  // Window of half-width R centred at a point; for integrands localized there.
  static QuadratureSpec localized(ComplexPoint origin, double radius = 6.0, double step = 0.05);
};

struct QuadratureResult {
  Complex value{0.0, 0.0};
  double error_estimate = 0.0;
  double tail_bound = 0.0;
  double richardson = 0.0;
  double rounding = 0.0;
  std::size_t nodes = 0;
};

// Integrand already carrying the Gaussian weight.
using PlaneIntegrand = std::function<LogComplex(ComplexPoint)>;
// Writes several weighted integrand values at one node.
using VectorIntegrand = std::function<void(ComplexPoint, std::span<Complex>)>;

QuadratureResult integrate_plane(const PlaneIntegrand& integrand, const QuadratureSpec& spec);

std::vector<QuadratureResult> integrate_plane(const VectorIntegrand& integrand, std::size_t components,
                                              const QuadratureSpec& spec);

// Bound used in reports for the mass of a poly(|z|) e^{-pi|z|^2/2} integrand
// outside the window.
double gaussian_tail_bound(double radius);

}  // namespace fockgabor
