#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fockgabor/fock.hpp"
#include "fockgabor/quadrature.hpp"
#include "fockgabor/weierstrass.hpp"

namespace fockgabor::series {

using fock::FockFunction;
using sigma::LatticeIndex;

// a_w = F(w)/||k_w||: the interpolation coefficients.
// b_w = <h_w, F> with h_w = (||k_w||/sigma_0'(w)) sigma_0/(. - w): the
// coefficients against the biorthogonal system of {k_w / ||k_w||}.
enum class CoefficientKind { a, b };

struct LatticeCoefficients {
  std::map<LatticeIndex, Complex> entries;
  CoefficientKind kind = CoefficientKind::a;
  std::string source_label;
  double truncation_radius = 0.0;

  // Sum of |c_w|^2 over |w| <= radius.
  double partial_l2(double radius) const;
  // max |c_w|^2 / log(1 + |w|).
  double log_growth_constant() const;
};

Complex coeff_a(const FockFunction& f, LatticeIndex w);
LatticeCoefficients a_coefficients(const FockFunction& f, double truncation_radius);

// Weighted evaluation of h_w.
LogComplex biorthogonal_weighted(LatticeIndex w, ComplexPoint z);
FockFunction biorthogonal_function(LatticeIndex w);

struct CoefficientB {
  Complex value{0.0, 0.0};
  double error_estimate = 0.0;
  // Present when f is a finite kernel combination.
  std::optional<Complex> closed_form;
};

CoefficientB coeff_b(const FockFunction& f, LatticeIndex w, const QuadratureSpec& spec);
// All coefficients in one pass over the grid.
std::vector<CoefficientB> coeff_b_many(const FockFunction& f, std::span<const LatticeIndex> ws,
                                       const QuadratureSpec& spec);
LatticeCoefficients b_coefficients(const FockFunction& f, double truncation_radius, const QuadratureSpec& spec);

struct Cl3Entry {
  LatticeIndex w;
  double norm = 0.0;
  double error_estimate = 0.0;
  // norm * |w| / sqrt(log(1 + |w|)).
  double ratio = 0.0;
};

struct Cl3Report {
  std::vector<Cl3Entry> entries;
  double max_ratio = 0.0;
  double truncation_radius = 0.0;
};

// ||sigma_0/(. - w)|| for |w| <= w_max. The norm is invariant under
// w -> iw and w -> conj(w), so only 0 <= arg w <= pi/4 is integrated and the
// result is listed for those representatives. The |z|^{-4} tail outside
// the window is added from the mean of |sigma e^{-pi|z|^2/2}|^2.
Cl3Report check_cl3(double w_max, const QuadratureSpec& spec);

struct IdentityCheck {
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
  double gap = 0.0;
  double quadrature_error = 0.0;
  // Cauchy-Schwarz estimate of the lattice terms beyond the truncation.
  double tail_estimate = 0.0;
  std::size_t terms = 0;
};

// An entire function G with simple zeros, evaluable divided by a few of them.
struct DivisibleFunction {
  std::string label;
  std::function<LogComplex(ComplexPoint)> weighted;
  // G(z) e^{-pi|z|^2/2} / prod_j (z - zeros[j]) for distinct zeros of G.
  std::function<LogComplex(ComplexPoint, std::span<const ComplexPoint>)> weighted_quotient;
};

// G(z) = sigma_0(z - a) e^{pi conj(a) z - pi|a|^2/2}: zeros a + Z, except a.
DivisibleFunction shifted_sigma0(ComplexPoint a);

// <G/((.-l1)(.-l2)(.-l3)), F> against
// sum_{0<|w|<=trunc} G(w) b_w / ((w-l1)(w-l2)(w-l3) ||k_w||).
IdentityCheck lemma3_identity(const DivisibleFunction& g, ComplexPoint l1, ComplexPoint l2, ComplexPoint l3,
                              const FockFunction& f, double trunc, const QuadratureSpec& spec);

// Same, reusing precomputed b_w = <h_w, F> for all |w| <= trunc.
IdentityCheck lemma3_identity(const DivisibleFunction& g, ComplexPoint l1, ComplexPoint l2, ComplexPoint l3,
                              const FockFunction& f, const LatticeCoefficients& b, const QuadratureSpec& spec);

// int f(xi)/(z - xi) dm(xi) for a weighted integrand f, on a grid with z at
// a vertex so the principal part cancels between opposite nodes.
QuadratureResult cauchy_integral(const PlaneIntegrand& f, ComplexPoint z, double radius, double step);

// sum a_w b_w [1/(z-w) + 1/(w-mu)] with a_w from f2 and b_w from f1, against
// int conj(F1) F2/(z-xi) dnu - (F2(z)/sigma_0(z)) int conj(F1) sigma_0/(z-xi) dnu
// + <F2/(.-mu), F1>.
IdentityCheck dople_identity(const FockFunction& f1, const FockFunction& f2, ComplexPoint z, ComplexPoint mu,
                             double trunc, const QuadratureSpec& spec);

// sum a_w ||k_w|| / (sigma_0'(w)(z-w)(l3-w)(l4-w)) against
// H2(z) / (sigma_0(z)(z-l3)(z-l4)), a_w = H2(w)/||k_w||.
IdentityCheck interp_identity_e2(const FockFunction& h2, ComplexPoint l3, ComplexPoint l4, ComplexPoint z,
                                 double trunc);

struct ResidueCheck {
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
  double gap = 0.0;
};

// Residue at a lattice point w0 of both sides of the e2 identity. The lattice
// sum gives a_{w0}||k_{w0}||/(sigma_0'(w0)(l3-w0)(l4-w0)) with the central
// difference sigma_0'; the right side's residue takes sigma_0(z)/(z - w0) at
// z = w0 from the deflated product.
ResidueCheck e2_residue(const FockFunction& h2, ComplexPoint l3, ComplexPoint l4, LatticeIndex w0);

}  // namespace fockgabor::series
