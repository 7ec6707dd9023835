#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fockgabor/log_complex.hpp"
#include "fockgabor/quadrature.hpp"

namespace fockgabor::fock {

// k_lambda(z) = e^{pi conj(lambda) z}, or its unit-norm version.
struct KernelSpec {
  ComplexPoint center{0.0, 0.0};
  bool normalized = true;

  // log ||k_lambda|| = pi |lambda|^2 / 2.
  double log_norm() const;
};

// k(z) e^{-pi|z|^2/2}. For the normalized kernel this is
// e^{-pi|z-lambda|^2/2} e^{i pi Im(conj(lambda) z)}.
LogComplex kernel_weighted_eval(const KernelSpec& kernel, ComplexPoint z);

// Coefficient on the normalized kernel centred at `center`.
struct KernelTerm {
  Complex coefficient{0.0, 0.0};
  ComplexPoint center{0.0, 0.0};
};

// f = sum_j c_j k_{lambda_j}/||k_{lambda_j}|| + s sigma_3.
struct KernelDecomposition {
  std::vector<KernelTerm> terms;
  Complex sigma3_coefficient{0.0, 0.0};
};

// An entire function known through its weighted evaluation
// z -> f(z) e^{-pi|z|^2/2}.
class FockFunction {
 public:
  using Evaluator = std::function<LogComplex(ComplexPoint)>;

  FockFunction(std::string label, Evaluator weighted, std::optional<KernelDecomposition> decomposition = std::nullopt,
               std::vector<ComplexPoint> known_zeros = {});

  LogComplex weighted(ComplexPoint z) const { return impl_->weighted(z); }
  Complex weighted_value(ComplexPoint z) const { return impl_->weighted(z).to_complex(); }
  const std::string& label() const { return impl_->label; }
  const std::optional<KernelDecomposition>& decomposition() const { return impl_->decomposition; }
  const std::vector<ComplexPoint>& known_zeros() const { return impl_->known_zeros; }
  const Evaluator& evaluator() const { return impl_->weighted; }

 private:
  struct Impl {
    std::string label;
    Evaluator weighted;
    std::optional<KernelDecomposition> decomposition;
    std::vector<ComplexPoint> known_zeros;
  };
  std::shared_ptr<const Impl> impl_;
};

FockFunction kernel_function(const KernelSpec& kernel);
FockFunction sigma3_function();
// Evaluates the decomposition directly.
FockFunction from_decomposition(std::string label, KernelDecomposition decomposition);
// sum_j c_j f_j; the decomposition is kept when every f_j carries one.
FockFunction linear_combination(std::string label, const std::vector<std::pair<Complex, FockFunction>>& parts);

// Weighted evaluation of a decomposition, term by term.
LogComplex evaluate_decomposition(const KernelDecomposition& decomposition, ComplexPoint z);

enum class InnerProductMethod { closed_form, quadrature };

// <f, g> = integral of f conj(g) e^{-pi|z|^2}.
Complex inner_product(const FockFunction& f, const FockFunction& g, InnerProductMethod method,
                      const QuadratureSpec& spec);
// Closed form: throws UnsupportedMethod without a usable decomposition.
Complex inner_product_closed_form(const FockFunction& f, const FockFunction& g);
QuadratureResult inner_product_quadrature(const FockFunction& f, const FockFunction& g, const QuadratureSpec& spec);

// A window large enough for <f, g>: localized on the kernel centres when one
// side is a pure kernel combination, otherwise radius 24 or more, covering
// every kernel centre.
QuadratureSpec suggested_spec(const FockFunction& f, const FockFunction& g, double step = 0.05);

// sqrt of the quadrature value of <f, f>.
double norm(const FockFunction& f, const QuadratureSpec& spec);

// ||sigma_3||^2 by quadrature on [-48, 48]^2, computed once.
double sigma3_norm_squared();

// Time-frequency shift tau_{x,y} gamma(s) = e^{2 pi i y s} e^{-pi (s-x)^2}.
struct GaborAtom {
  double x = 0.0;
  double y = 0.0;
};

// 2^{1/4} B(tau_{u,v} gamma) = e^{i pi u v} k_{conj(lambda)}/||k||, lambda = u + iv.
FockFunction bargmann_gabor(const GaborAtom& atom);
Complex bargmann_gabor_phase(const GaborAtom& atom);

// A function on the real line available on [support_min, support_max].
struct RealLineSignal {
  std::string label;
  std::function<Complex(double)> value;
  double support_min = -40.0;
  double support_max = 40.0;
};

RealLineSignal gabor_signal(const GaborAtom& atom);

// (Bf)(z) e^{-pi|z|^2/2} from
// Bf(z) = 2^{1/4} int f(t) e^{-pi t^2} e^{2 pi t z} e^{-pi z^2/2} dt,
// midpoint rule of step 0.01 on [-T, T], T = max(8, |Re z| + 6).
LogComplex bargmann_numeric(const RealLineSignal& f, ComplexPoint z);

// int f conj(g) dt over the common support, midpoint rule.
Complex l2_inner_product(const RealLineSignal& f, const RealLineSignal& g, double step = 0.002);

}  // namespace fockgabor::fock
