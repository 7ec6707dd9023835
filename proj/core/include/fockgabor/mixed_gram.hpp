#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fockgabor/counterexample.hpp"
#include "fockgabor/fock.hpp"
#include "fockgabor/quadrature.hpp"

namespace fockgabor::gram {

using fock::FockFunction;

// A member of a mixed system: either the normalized kernel at `point`, or
// general vector `general_index` (normalized by its quadrature norm).
struct MixedVector {
  std::string label;
  ComplexPoint point{0.0, 0.0};
  bool is_kernel = true;
  std::size_t general_index = 0;
};

// Writes the weighted values of all general vectors at one node.
using JointEvaluator = std::function<void(ComplexPoint, std::span<Complex>)>;

struct MixedSystemSpec {
  std::vector<ComplexPoint> lambda1;
  std::vector<ComplexPoint> lambda2;
  std::vector<MixedVector> vectors;
  std::vector<int> section_sizes;
  std::size_t general_count = 0;
  JointEvaluator joint;

  // Lambda_1 and Lambda_2 disjoint, section sizes increasing and available,
  // general indices consistent.
  void validate() const;
};

// {k_lambda}_{Lambda_2} with {g_v / ||g_v||}_{Lambda_1}, alternating between
// the two lists, each ordered by |lambda|, until one runs out.
MixedSystemSpec construction_system(const construction::ConstructionResult& result, std::vector<int> section_sizes);

// Normalized kernels at the given points, in the given order.
MixedSystemSpec kernel_system(std::vector<ComplexPoint> points, std::vector<int> section_sizes);

// Points of 2Z[i] ordered by (|w|, arg w), starting at the origin.
std::vector<ComplexPoint> sparse_lattice_points(std::size_t count);

// Hermitian matrix stored row-major.
struct GramMatrix {
  std::size_t size = 0;
  std::vector<Complex> entries;
  // max |G - G^*| before symmetrisation.
  double asymmetry = 0.0;

  Complex operator()(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
  Complex& operator()(std::size_t i, std::size_t j) { return entries[i * size + j]; }
  GramMatrix leading(std::size_t n) const;
};

// Gram matrix <v_i, v_j> of the first `size` vectors. Kernel pairs use the
// closed form, kernel-general pairs the reproducing property, and general
// pairs one quadrature pass; the result is averaged with its conjugate
// transpose.
GramMatrix gram_matrix(const MixedSystemSpec& spec, std::size_t size, const QuadratureSpec& quad);

struct SvdResult {
  // Descending.
  std::vector<double> singular_values;
  // Right singular vectors as columns, row-major n x n.
  std::vector<Complex> right_vectors;
};

// One-sided Jacobi SVD of a square complex matrix.
SvdResult jacobi_svd(const GramMatrix& m);

struct GramReport {
  std::size_t section_size = 0;
  std::vector<double> singular_values;
  double sigma_min = 0.0;
  double sigma_2min = 0.0;
  // Unit coefficients a with ||sum a_i v_i||^2 = sigma_min, largest entry
  // real positive.
  std::vector<Complex> null_vector;
  // sigma_max / sigma_min.
  double conditioning = 0.0;
  double asymmetry = 0.0;
};

GramReport analyse(const GramMatrix& m);

// One report per section size, all taken from a single Gram matrix.
std::vector<GramReport> defect_scan(const MixedSystemSpec& spec, const QuadratureSpec& quad);

// |<sum a_i v_i, candidate>| / (||sum a_i v_i|| ||candidate||) for the
// report's null vector a, clamped to [0, 1].
double null_vector_correlation(const GramReport& report, const MixedSystemSpec& spec, const FockFunction& candidate,
                               const QuadratureSpec& quad);

}  // namespace fockgabor::gram
