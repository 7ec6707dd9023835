#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fockgabor/fock.hpp"
#include "fockgabor/lattice_series.hpp"
#include "fockgabor/quadrature.hpp"
#include "fockgabor/weierstrass.hpp"

namespace fockgabor::construction {

using fock::FockFunction;
using sigma::LatticeIndex;

// u_1 = q, u_n = 2^{n-1} q for n <= levels.
struct ConstructionParams {
  int q = 8;
  int levels = 3;
  double tol_root = 1e-10;
  double tol_solve = 1e-8;
  QuadratureSpec spec;
  double trunc = 12.0;

  std::vector<double> u() const;
  // Smallest window radius that keeps every construction feature inside:
  // u_N + 2 sqrt(u_N) + 8.
  double required_radius() const;
  void validate() const;

  // Parameters with the window set to ceil(required_radius()).
  static ConstructionParams with_window(int q, int levels, double step = 0.05);
};

// F = sigma_3 + sum_n u_n^{-1/2} (k_{u_n} - k_{u_n + 1}), normalized kernels.
FockFunction build_F(const ConstructionParams& params);

// Root of F in (u + 1/3, u + 2/3) by bisection on the weighted values, which
// are real on the real axis. Throws PreconditionError without a sign change.
double find_beta(const FockFunction& f, double u, double tol_root);
std::vector<double> find_betas(const FockFunction& f, const ConstructionParams& params);

struct ZeroScan {
  // Zeros found in the scanned square, ordered by (|z|, arg z).
  std::vector<ComplexPoint> zeros;
  // Total given by the argument principle over the cells.
  std::size_t counted = 0;
  // Cells where the number of zeros found differs from the count.
  std::vector<LatticeIndex> mismatched_cells;
  // max |F(z) e^{-pi|z|^2/2}| over the zeros found.
  double max_residual = 0.0;
};

// Zeros of f in [-radius, radius]^2. Each unit cell, offset by (0.13, 0.11)
// from the half-integer grid, holds one lattice point; the cell count is the
// winding number of f/sigma_3 plus one for a zero of sigma_3, and the zeros
// are located by deflated Newton from the lattice point and a 3x3 set of
// starts.
ZeroScan scan_zeros(const FockFunction& f, double radius);

// v_n = u_n - sqrt(u_n) moved by the first of +0.01, -0.01, +0.02, ... that
// keeps it 0.05 away from the lattice, from every avoided point and from the
// other v_m. Throws PreconditionError after 100 nudges.
std::vector<double> choose_vs(std::span<const double> u, std::span<const ComplexPoint> avoid);

struct NodeValues {
  Complex sigma3{0.0, 0.0};
  Complex f{0.0, 0.0};
  // G_1(z) / S(z), unweighted.
  Complex ratio{0.0, 0.0};
  // F/S and G = G_1 F / S, weighted.
  Complex g2{0.0, 0.0};
  Complex g{0.0, 0.0};
  Complex h{0.0, 0.0};
};

// Evaluates the construction with plain complex arithmetic. Weighted values
// stay O(1) inside the window, so nodes share one sigma evaluation.
class Model {
 public:
  Model(std::vector<double> u, std::vector<double> roots, std::vector<double> vs, std::vector<double> ds);

  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& roots() const { return roots_; }
  const std::vector<double>& vs() const { return vs_; }
  const std::vector<double>& ds() const { return ds_; }

  Complex weighted_f(ComplexPoint z, const sigma::SigmaSample& s) const;
  Complex weighted_sigma3(const sigma::SigmaSample& s) const;
  Complex weighted_f_at(ComplexPoint z) const;
  NodeValues node(ComplexPoint z) const;
  NodeValues node(ComplexPoint z, const sigma::SigmaSample& s) const;

  Complex g1(ComplexPoint z) const;
  Complex s(ComplexPoint z) const;
  // Weighted F/S; near a root r the quotient F/(1 - z/r) is taken as a
  // divided difference of F.
  Complex weighted_g2(ComplexPoint z, const sigma::SigmaSample& s) const;
  // Weighted g_lambda = G/(z - lambda) for lambda = v_n.
  Complex weighted_g_v(std::size_t n, ComplexPoint z, const NodeValues& values) const;
  // Weighted G/(z - lambda) for a zero lambda of F that is not a root of S;
  // flambda is weighted_f_at(lambda).
  Complex weighted_g_zero(ComplexPoint lambda, Complex flambda, ComplexPoint z, const sigma::SigmaSample& s) const;
  // Weighted G / prod_j (z - v_{idx[j]}).
  Complex weighted_g_over_vs(std::span<const std::size_t> idx, ComplexPoint z, const NodeValues& values) const;

 private:
  // Weighted [F(z) - F(a)]/(z - a), fa the weighted F(a). F(a) is dropped
  // outside the deflation window, where it is below the root tolerance.
  Complex divided_f(ComplexPoint z, ComplexPoint a, Complex fa, const sigma::SigmaSample& s) const;

  std::vector<double> u_;
  std::vector<double> roots_;
  std::vector<double> vs_;
  std::vector<double> ds_;
  std::vector<Complex> root_values_;
};

struct SolveReport {
  // A_{nm} = u_m^{-1/3} <g_{v_n}, k_{u_m}/||k_{u_m}||>, gamma_n = <g_{v_n}, sigma_3>.
  std::vector<std::vector<double>> matrix;
  std::vector<double> gamma;
  std::vector<double> gamma_imag;
  std::vector<double> gamma_error;
  std::vector<double> ds;
  double residual = 0.0;
  // ||A||_inf ||A^{-1}||_inf.
  double condition = 0.0;
  // max_n sum_{m != n} |A_{nm}| / |A_{nn}|.
  double dominance = 0.0;
  // u_n^{1/2} |<g_{v_n}, k_{u_n}/||k_{u_n}||>|.
  std::vector<double> kernel_scaling;
  // max over n != m of |<g_{v_n}, k_{u_m}/||.||>| max(u_m, u_n).
  double cross_scaling = 0.0;
  // max_n |gamma_n| v_n.
  double coupling_scaling = 0.0;
};

// Builds A and gamma, solves A d = -gamma and certifies dominance and
// |d_n| < 1. Throws PreconditionError when either fails.
SolveReport assemble_and_solve_d(const Model& model, const ConstructionParams& params);

// H = sigma_3 + sum_n d_n u_n^{-1/3} k_{u_n}.
FockFunction build_H(std::span<const double> u, std::span<const double> ds);

struct ConstructionResult {
  ConstructionParams params;
  std::vector<double> u;
  std::vector<double> betas;
  std::vector<double> vs;
  std::vector<double> ds;
  FockFunction F;
  FockFunction H;
  FockFunction G;
  FockFunction G1;
  FockFunction G2;
  FockFunction S;
  // g_{v_n}, aligned with vs.
  std::vector<FockFunction> g;
  std::vector<ComplexPoint> lambda1;
  // Zeros of F in the window other than the u_n + beta_n.
  std::vector<ComplexPoint> lambda2;
  std::shared_ptr<const Model> model;
  ZeroScan scan;
  SolveReport solve;
  std::vector<double> root_residuals;
};

ConstructionResult build_construction(const ConstructionParams& params);

// G with zeros Lambda_1 and Lambda_2, divisible by points of Lambda_1.
series::DivisibleFunction generating_function(const ConstructionResult& result);

struct Verification {
  // P2: max |F(lambda)| e^{-pi|lambda|^2/2} over sampled lambda in Lambda_2.
  double p2_residual = 0.0;
  std::size_t p2_samples = 0;
  // P3: max_n |<g_{v_n}, H>| by quadrature.
  double p3_residual = 0.0;
  double p3_error = 0.0;
  // P4.
  Complex p4_value{0.0, 0.0};
  Complex p4_closed_form{0.0, 0.0};
  double p4_error = 0.0;
  double sigma3_norm_sq = 0.0;
  double f_deviation = 0.0;
  double h_deviation = 0.0;
  // (||F - sigma_3|| + ||H - sigma_3||) q^{1/3}.
  double deviation_constant = 0.0;
  // ||g_lambda|| for lambda in Lambda_1, then for the sampled Lambda_2 points.
  std::vector<double> g_norms;
  std::vector<ComplexPoint> g_norm_points;
  // Estimate panel over a deterministic sample of the window.
  // max |G| e^{-pi|z|^2/2} / (1 + |z|).
  double g_upper = 0.0;
  // min |F| e^{-pi|z|^2/2} (1 + |z|)^4 off the disks D(u_n, 2 sqrt(u_n)) and
  // D(w, 1/10), w in the lattice.
  double f_lower = 0.0;
  // Range of |G_1/S| |(z - u_n - beta_n)/(z - v_n)| on D(u_n, 2 sqrt(u_n)).
  double ratio_disk_low = 0.0;
  double ratio_disk_high = 0.0;
  // Range of |G_1/S| off those disks.
  double ratio_off_low = 0.0;
  double ratio_off_high = 0.0;
  // min sqrt(u_n) |G| e^{-pi|z|^2/2} on D(u_n, 1/3).
  double g_disk_low = 0.0;
  // Lambda avoids D(0, 1/2).
  double lambda_min_modulus = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

Verification verify_properties(const ConstructionResult& result);

struct OrthogonalityEntry {
  int power = 0;
  int cut = 0;
  Complex value{0.0, 0.0};
  double error_estimate = 0.0;
  // For power < cut, z^n G/p_k is a combination of g_{v_1..v_k}; the same
  // combination of the P3 inner products.
  bool predicted_available = false;
  Complex predicted{0.0, 0.0};
  // |<z^n G_2 G_1/p_k, sigma_3>| for contrast.
  double control = 0.0;
};

// <z^n (G_1/p_k) G_2, H> for n <= n_max, p_k = prod_{m <= k}(1 - z/v_m).
std::vector<OrthogonalityEntry> myex_orthogonality(const ConstructionResult& result, int n_max, int k_cut,
                                                   const QuadratureSpec& spec);

}  // namespace fockgabor::construction
