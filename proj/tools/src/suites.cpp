#include "suites.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include "fockgabor/counterexample.hpp"
#include "fockgabor/lattice_series.hpp"
#include "fockgabor/mixed_gram.hpp"
#include "fockgabor/weierstrass.hpp"

namespace fockgabor::cli {

namespace {

using fock::FockFunction;
using fock::KernelSpec;
using sigma::LatticeIndex;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class PanelBuilder {
 public:
  PanelBuilder(std::string suite, std::string name) : suite_(std::move(suite)), start_(Clock::now()) {
    panel_.name = std::move(name);
  }

  void bound(const std::string& id, const std::string& anchor, Complex value, double tol) {
    panel_.rows.push_back(bound_row(suite_, id, anchor, value, tol));
  }
  void at_least(const std::string& id, const std::string& anchor, double value, double tol) {
    panel_.rows.push_back(at_least_row(suite_, id, anchor, value, tol));
  }
  void rule(const std::string& id, const std::string& anchor, Complex value, double tol, bool ok) {
    panel_.rows.push_back(rule_row(suite_, id, anchor, value, tol, ok));
  }
  void info(const std::string& id, const std::string& anchor, Complex value) {
    panel_.rows.push_back(info_row(suite_, id, anchor, value));
  }

  // Runs one check; an exception becomes a fail row and the panel goes on.
  template <class Fn>
  void guard(const std::string& id, const std::string& anchor, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      rule(id, anchor, kNaN, 0.0, false);
      panel_.errors.push_back(id + ": " + e.what());
    }
  }

  Panel finish() {
    panel_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(panel_);
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::string suite_;
  Clock::time_point start_;
  Panel panel_;
};

std::string point_name(ComplexPoint z) {
  std::string out = format_number(z.real());
  if (z.imag() != 0.0) out += (z.imag() < 0 ? "" : "+") + format_number(z.imag()) + "i";
  return out;
}

FockFunction kernel(ComplexPoint c) { return fock::kernel_function({c, true}); }

double relative(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Gaps at or below this are set by the step-1e-5 central difference for
// sigma_0'(w), not by truncation or grid step.
constexpr double kGapFloor = 1e-8;

// Smaller after refinement, or unchanged when already at the floor.
void decrease_row(PanelBuilder& b, const std::string& id, const std::string& anchor, double base, double refined) {
  b.rule(id, anchor, refined, base, refined < base || (refined <= base && base <= kGapFloor));
}

// ---------------------------------------------------------------- verify-fock

Panel reproducing_panel(const RunConfig& config) {
  PanelBuilder b("verify-fock", "reproducing");
  const auto corpus = function_corpus();
  const double step = config.quad_step;

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ComplexPoint> lambdas;
  for (int j = 0; j < 50; ++j) {
    const double r = 4.0 * std::sqrt(unit(rng));
    lambdas.push_back(std::polar(r, 2.0 * kPi * unit(rng)));
  }
  QuadratureSpec window;
  window.truncation_radius = 10.0;
  window.step = step;
  const std::string anchor = "reproducing property";
  for (const auto& [name, f] : corpus) {
    b.guard("reproducing." + name, anchor, [&] {
      const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> out) {
        const Complex w = f.weighted_value(z);
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
          out[j] = w * std::conj(fock::kernel_weighted_eval({lambdas[j], true}, z).to_complex());
        }
      };
      const std::vector<QuadratureResult> q = integrate_plane(integrand, lambdas.size(), window);
      double ratio = 0.0;
      double worst = 0.0;
      for (std::size_t j = 0; j < lambdas.size(); ++j) {
        const double diff = std::abs(q[j].value - f.weighted_value(lambdas[j]));
        ratio = std::max(ratio, diff / q[j].error_estimate);
        worst = std::max(worst, diff);
      }
      b.bound("reproducing." + name, anchor, ratio, 1.0);
      b.info("reproducing." + name + ".max_error", anchor, worst);
    });
  }

  // Pairs where both sides carry sigma_3 share one pass: sigma_3 is evaluated
  // once per node and each side is assembled from its decomposition.
  std::vector<std::size_t> with_sigma3;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus[i].second.decomposition();
    if (d && d->sigma3_coefficient != Complex{0.0, 0.0}) with_sigma3.push_back(i);
  }
  std::map<std::pair<std::size_t, std::size_t>, QuadratureResult> shared;
  auto shared_pass = [&] {
    if (!shared.empty() || with_sigma3.empty()) return;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    QuadratureSpec spec;
    spec.step = step;
    spec.truncation_radius = 0.0;
    for (std::size_t a = 0; a < with_sigma3.size(); ++a) {
      for (std::size_t c = a; c < with_sigma3.size(); ++c) {
        pairs.emplace_back(with_sigma3[a], with_sigma3[c]);
        const QuadratureSpec own =
            fock::suggested_spec(corpus[with_sigma3[a]].second, corpus[with_sigma3[c]].second, step);
        spec.truncation_radius = std::max(spec.truncation_radius, own.truncation_radius);
      }
    }
    std::vector<fock::KernelDecomposition> kernels;
    std::vector<Complex> coefficients;
    for (std::size_t i : with_sigma3) {
      kernels.push_back(*corpus[i].second.decomposition());
      coefficients.push_back(kernels.back().sigma3_coefficient);
      kernels.back().sigma3_coefficient = {0.0, 0.0};
    }
    const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> out) {
      const Complex s3 = sigma::sigma3_weighted(z).to_complex();
      std::vector<Complex> values(with_sigma3.size());
      for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = coefficients[k] * s3 + fock::evaluate_decomposition(kernels[k], z).to_complex();
      }
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto ia = std::find(with_sigma3.begin(), with_sigma3.end(), pairs[p].first) - with_sigma3.begin();
        const auto ic = std::find(with_sigma3.begin(), with_sigma3.end(), pairs[p].second) - with_sigma3.begin();
        out[p] = values[ia] * std::conj(values[ic]);
      }
    };
    const std::vector<QuadratureResult> q = integrate_plane(integrand, pairs.size(), spec);
    for (std::size_t p = 0; p < pairs.size(); ++p) shared[pairs[p]] = q[p];
  };

  const std::string pair_anchor = "closed form against quadrature";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& [name, f] = corpus[i];
    b.guard("closed_vs_quadrature." + name, pair_anchor, [&] {
      double worst = 0.0;
      double ratio = 0.0;
      std::size_t pairs = 0;
      for (std::size_t j = i; j < corpus.size(); ++j) {
        const FockFunction& g = corpus[j].second;
        Complex cf;
        try {
          cf = fock::inner_product_closed_form(f, g);
        } catch (const UnsupportedMethod&) {
          continue;
        }
        QuadratureResult q;
        const auto carries = [&](std::size_t k) { return std::count(with_sigma3.begin(), with_sigma3.end(), k) > 0; };
        if (carries(i) && carries(j)) {
          shared_pass();
          q = shared.at({i, j});
        } else {
          q = fock::inner_product_quadrature(f, g, fock::suggested_spec(f, g, step));
        }
        const double diff = std::abs(cf - q.value);
        worst = std::max(worst, diff);
        ratio = std::max(ratio, diff / q.error_estimate);
        ++pairs;
      }
      if (pairs == 0) return;
      b.bound("closed_vs_quadrature." + name, pair_anchor, worst, 1e-6);
      b.bound("closed_vs_quadrature." + name + ".estimate_ratio", pair_anchor, ratio, 1.0);
    });
  }

  b.guard("kernel_overlap.max_relative", "kernel inner product", [&] {
    const std::vector<ComplexPoint> centers{{0, 0}, {1, 0}, {0, 1}, {1.5, -0.5}, {-2, 1}, {3, 2}, {0.2, 0}, {-1, -1}};
    double worst = 0.0;
    for (ComplexPoint a : centers) {
      for (ComplexPoint c : centers) {
        const double got = std::abs(fock::inner_product_closed_form(kernel(a), kernel(c)));
        worst = std::max(worst, std::abs(got / std::exp(-kPi * std::norm(a - c) / 2.0) - 1.0));
      }
    }
    b.bound("kernel_overlap.max_relative", "kernel inner product", worst, 1e-10);
  });

  b.guard("kernel_eval.example", "weighted kernel", [&] {
    const Complex v = fock::kernel_weighted_eval({{1.0, 0.0}, true}, {0.0, 1.0}).to_complex();
    b.info("kernel_eval.example", "weighted kernel", v);
    b.bound("kernel_eval.example.error", "weighted kernel", v + std::exp(-kPi), 1e-15);
  });
  b.guard("norm.k1", "kernel norm", [&] {
    const double n = fock::norm(fock::kernel_function({{1.0, 0.0}, false}), QuadratureSpec::localized({1.0, 0.0}, 6.0, step));
    b.info("norm.k1", "kernel norm", n);
    b.bound("norm.k1.relative_error", "kernel norm", n / std::exp(kPi / 2.0) - 1.0, 1e-6);
  });
  b.guard("inner.k1_ki", "kernel inner product", [&] {
    const Complex v = fock::inner_product_closed_form(fock::kernel_function({{1.0, 0.0}, false}),
                                                      fock::kernel_function({{0.0, 1.0}, false}));
    b.bound("inner.k1_ki", "kernel inner product", v + 1.0, 1e-12);
  });
  b.guard("inner.sigma3_k8", "closed form against quadrature", [&] {
    const FockFunction s3 = fock::sigma3_function();
    const FockFunction k8 = kernel({8.0, 0.0});
    const QuadratureResult q = fock::inner_product_quadrature(s3, k8, fock::suggested_spec(s3, k8, step));
    const Complex cf = fock::inner_product_closed_form(s3, k8);
    b.info("inner.sigma3_k8", "closed form against quadrature", cf);
    b.bound("inner.sigma3_k8.gap", "closed form against quadrature", cf - q.value, 1e-6);
  });
  return b.finish();
}

Panel bargmann_panel(const RunConfig& config) {
  PanelBuilder b("verify-fock", "bargmann");
  const std::vector<fock::GaborAtom> atoms{{0, 0},    {1, 0},     {0, 1},    {1.5, 0.7}, {-2, 1.3},
                                           {0.5, -1.5}, {-1, -1}, {2.5, 0.3}, {-0.7, 2.2}, {3, -2}};
  std::vector<ComplexPoint> grid;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) grid.emplace_back(-3.0 + 2.0 * i / 3.0, -3.0 + 2.0 * j / 3.0);
  }
  const double root4 = std::pow(2.0, 0.25);
  const std::string anchor = "Bargmann transform of Gaussian shifts";
  for (const fock::GaborAtom& a : atoms) {
    const std::string tag = format_number(a.x) + "," + format_number(a.y);
    b.guard("bargmann.pointwise(" + tag + ")", anchor, [&] {
      const fock::RealLineSignal s = fock::gabor_signal(a);
      const FockFunction g = fock::bargmann_gabor(a);
      double worst = 0.0;
      for (ComplexPoint z : grid) {
        worst = std::max(worst, std::abs(root4 * fock::bargmann_numeric(s, z).to_complex() - g.weighted_value(z)));
      }
      b.bound("bargmann.pointwise(" + tag + ")", anchor, worst, 1e-6);
    });
    b.guard("bargmann.l2_norm(" + tag + ")", "Gabor atom norm", [&] {
      const fock::RealLineSignal s = fock::gabor_signal(a);
      const double n = std::sqrt(fock::l2_inner_product(s, s).real());
      b.bound("bargmann.l2_norm(" + tag + ")", "Gabor atom norm", n - 1.0 / root4, 1e-10);
    });
    b.guard("bargmann.fock_norm(" + tag + ")", "Bargmann transform of Gaussian shifts", [&] {
      const FockFunction g = fock::bargmann_gabor(a);
      const double n = fock::norm(g, QuadratureSpec::localized({a.x, -a.y}, 6.0, config.quad_step));
      b.bound("bargmann.fock_norm(" + tag + ")", anchor, n - 1.0, 1e-6);
    });
  }
  std::vector<std::pair<fock::GaborAtom, fock::GaborAtom>> pairs;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) pairs.emplace_back(atoms[i], atoms[i + 1]);
  pairs.emplace_back(fock::GaborAtom{0, 0}, fock::GaborAtom{1, 1});
  const std::string unitary = "Bargmann unitarity";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string id = "bargmann.unitarity." + std::to_string(i);
    b.guard(id, unitary, [&] {
      const auto& [x, y] = pairs[i];
      const FockFunction fx = fock::bargmann_gabor(x);
      const FockFunction fy = fock::bargmann_gabor(y);
      // <2^{1/4} B f, 2^{1/4} B g> = sqrt(2) <f, g>.
      const Complex l2 = std::sqrt(2.0) * fock::l2_inner_product(fock::gabor_signal(x), fock::gabor_signal(y));
      const Complex cf = fock::inner_product_closed_form(fx, fy);
      const Complex quad = fock::inner_product_quadrature(fx, fy, fock::suggested_spec(fx, fy, config.quad_step)).value;
      b.bound(id + ".closed_form", unitary, cf - l2, 1e-6);
      b.bound(id + ".quadrature", unitary, quad - l2, 1e-6);
    });
  }
  return b.finish();
}

// --------------------------------------------------------------- verify-sigma

Panel sigma_panel() {
  PanelBuilder b("verify-sigma", "sigma");
  const sigma::SigmaConfig& cfg = sigma::default_sigma_config();
  std::mt19937_64 rng(20240612);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  b.guard("quasi_periodicity", "sigma quasi-periodicity", [&] {
    // Evaluated without lattice reduction so the identity is not built in.
    const sigma::SigmaConfig direct = sigma::make_sigma_config(200.0, false, true);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const ComplexPoint z{unit(rng) - 0.5, unit(rng) - 0.5};
      const LogComplex w = sigma::sigma_weighted(z, direct);
      const LogComplex w1 = sigma::sigma_weighted(z + 1.0, direct);
      const LogComplex wi = sigma::sigma_weighted(z + Complex{0.0, 1.0}, direct);
      const LogComplex t1 = LogComplex::from_log(cfg.eta_1 * (z + 0.5) - kPi * (2.0 * z.real() + 1.0) / 2.0 +
                                                 Complex{0.0, kPi});
      const LogComplex ti = LogComplex::from_log(cfg.eta_i * (z + Complex{0.0, 0.5}) -
                                                 kPi * (2.0 * z.imag() + 1.0) / 2.0 + Complex{0.0, kPi});
      worst = std::max(worst, std::abs((w1 / (w * t1)).to_complex() - 1.0));
      worst = std::max(worst, std::abs((wi / (w * ti)).to_complex() - 1.0));
    }
    b.bound("quasi_periodicity", "sigma quasi-periodicity", worst, 1e-9);
  });
  b.guard("legendre", "Legendre relation", [&] {
    b.info("eta_1", "quasi-period constants", cfg.eta_1);
    b.info("eta_i", "quasi-period constants", cfg.eta_i);
    b.bound("legendre", "Legendre relation", cfg.legendre_residual(), 1e-12);
  });
  b.guard("oddness", "sigma oddness", [&] {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const ComplexPoint z = std::polar(6.0 * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
      worst = std::max(worst, std::abs((sigma::sigma_weighted(-z) / sigma::sigma_weighted(z)).to_complex() + 1.0));
    }
    b.bound("oddness", "sigma oddness", worst, 1e-10);
  });
  b.guard("realness", "sigma realness", [&] {
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double x = 20.0 * unit(rng) - 10.0;
      const LogComplex w = sigma::sigma_weighted({x, 0.0});
      if (w.is_zero()) continue;
      const double p = std::abs(w.phase());
      worst = std::max(worst, std::min(p, kPi - p));
    }
    b.bound("realness", "sigma realness", worst, 1e-10);
  });
  b.guard("bound", "sigma two-sided bound", [&] {
    const sigma::SigmaBound near = sigma::check_sigma_bound(2000, cfg);
    const sigma::SigmaBound far = sigma::check_sigma_bound(2000, sigma::make_sigma_config(400.0));
    b.rule("bound.c_low", "sigma two-sided bound", near.c_low, 0.0, near.c_low > 0.0);
    b.rule("bound.c_high", "sigma two-sided bound", near.c_high, near.c_low, near.c_high >= near.c_low);
    b.bound("bound.ratio", "sigma two-sided bound", near.c_high / near.c_low, 1e3);
    b.bound("bound.c_low.radius_doubling", "sigma two-sided bound", far.c_low / near.c_low - 1.0, 1e-6);
    b.bound("bound.c_high.radius_doubling", "sigma two-sided bound", far.c_high / near.c_high - 1.0, 1e-6);

    double decay = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const ComplexPoint z = std::polar(10.0 * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
      decay = std::max(decay, sigma::sigma3_weighted(z).abs() * std::pow(1.0 + std::abs(z), 3.0));
    }
    b.info("sigma3.decay_constant", "sigma_3 decay", decay / near.c_high);
  });
  b.guard("sigma3.half", "sigma_3", [&] {
    const Complex v = sigma::sigma3_weighted({0.5, 0.0}).to_complex();
    const Complex lit = sigma::sigma_truncated_product_weighted({0.5, 0.0}, 400.0).to_complex() /
                        (0.5 * -0.5 * -1.5 * -2.5);
    b.info("sigma3.half", "sigma_3", v);
    b.bound("sigma3.half.product_gap", "sigma_3", relative(v, lit), 1e-9);
  });
  b.guard("sigma3.zero_at_4", "sigma_3", [&] {
    const bool zero = sigma::sigma3_weighted({4.0, 0.0}).is_zero();
    b.rule("sigma3.zero_at_4", "sigma_3", zero ? 0.0 : 1.0, 0.0, zero);
  });
  b.guard("sigma.derivative_at_zero", "sigma", [&] {
    const double h = 1e-5;
    const double d = sigma::sigma_weighted({h, 0.0}).to_complex().real() * std::exp(kPi * h * h / 2.0) / h;
    b.bound("sigma.derivative_at_zero", "sigma", d - 1.0, 1e-4);
  });
  b.guard("sigma0_prime", "sigma_0 derivative at the lattice", [&] {
    const std::string anchor = "sigma_0 derivative at the lattice";
    const Complex w1 = sigma::sigma0_prime_at_lattice({1, 0}).to_complex();
    b.info("sigma0_prime.w1", anchor, w1);
    b.rule("sigma0_prime.w1.range", anchor, std::abs(w1), 0.1, std::abs(w1) >= 0.1 && std::abs(w1) <= 10.0);
    const Complex a = sigma::sigma0_prime_at_lattice({1, 2}).to_complex();
    const Complex c = sigma::sigma0_prime_at_lattice({1, -2}).to_complex();
    b.bound("sigma0_prime.conjugate_symmetry", anchor, relative(c, std::conj(a)), 1e-8);
    const double r1 = sigma::sigma0_prime_at_lattice({2, 1}).abs();
    const double r2 = sigma::sigma0_prime_at_lattice({-1, 2}).abs();
    b.bound("sigma0_prime.rotation", anchor, r2 / r1 - 1.0, 1e-8);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (LatticeIndex w : sigma::lattice_points(12.0)) {
      const double m = sigma::sigma0_prime_at_lattice(w).abs() * std::abs(w.point());
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    b.info("sigma0_prime.scaled_min", anchor, lo);
    b.info("sigma0_prime.scaled_max", anchor, hi);
    b.bound("sigma0_prime.scaled_spread", anchor, hi / lo, 10.0);
  });
  b.guard("dist_to_lattice", "distance to the lattice", [&] {
    const double e = std::abs(sigma::dist_to_lattice({0.5, 0.0}) - 0.5) +
                     std::abs(sigma::dist_to_lattice({0.5, 0.5}) - std::sqrt(0.5)) +
                     std::abs(sigma::dist_to_lattice({3.0, 4.0}));
    b.bound("dist_to_lattice", "distance to the lattice", e, 1e-15);
  });
  return b.finish();
}

// ----------------------------------------------------------- check-identities

FockFunction times_linear(const FockFunction& f, std::vector<ComplexPoint> roots, std::string label) {
  return FockFunction(std::move(label), [f, roots](ComplexPoint z) {
    Complex p{1.0, 0.0};
    for (ComplexPoint r : roots) p *= z - r;
    return f.weighted(z) * LogComplex::from_complex(p);
  });
}

struct Lemma3Case {
  std::string name;
  ComplexPoint shift;
  std::array<ComplexPoint, 3> zeros;
  FockFunction f;
};

struct DopleCase {
  std::string name;
  FockFunction f1;
  FockFunction f2;
  ComplexPoint z;
  ComplexPoint mu;
};

struct E2Case {
  std::string name;
  FockFunction h2;
  ComplexPoint l3;
  ComplexPoint l4;
  ComplexPoint z;
};

Panel identities_panel(const RunConfig& config) {
  PanelBuilder b("check-identities", "identities");
  const double trunc = config.trunc;
  const double refined_trunc = trunc + 4.0;
  const double h = config.quad_step;
  auto window = [](double step) {
    QuadratureSpec s;
    s.truncation_radius = 8.0;
    s.step = step;
    return s;
  };

  const std::vector<Lemma3Case> lemma3_cases{
      {"shifted_half", {0.5, 0.5}, {{{1.5, 0.5}, {0.5, 1.5}, {-0.5, 0.5}}}, kernel({0.7, -0.4})},
      {"lattice_kernel", {0.5, 0.5}, {{{0.5, -0.5}, {1.5, 1.5}, {-1.5, 0.5}}}, kernel({1.0, 1.0})},
      {"kernel_pair",
       {0.3, -0.2},
       {{{1.3, -0.2}, {0.3, 0.8}, {-0.7, -1.2}}},
       fock::linear_combination("kernel_pair", {{0.6, kernel({-0.5, 0.25})}, {Complex{0.0, -0.8}, kernel({1.2, 0.7})}})},
  };
  const std::string l3_anchor = "summation identity for three zeros";
  for (const Lemma3Case& c : lemma3_cases) {
    const std::string id = "lemma3." + c.name;
    b.guard(id, l3_anchor, [&] {
      const series::DivisibleFunction g = series::shifted_sigma0(c.shift);
      const series::IdentityCheck base = series::lemma3_identity(g, c.zeros[0], c.zeros[1], c.zeros[2], c.f, trunc, window(h));
      const series::IdentityCheck fine =
          series::lemma3_identity(g, c.zeros[0], c.zeros[1], c.zeros[2], c.f, refined_trunc, window(h / 2.0));
      b.info(id + ".lhs", l3_anchor, base.lhs);
      b.bound(id + ".gap", l3_anchor, base.gap, 1e-4);
      b.info(id + ".tail_estimate", l3_anchor, base.tail_estimate);
      decrease_row(b, id + ".refined_gap", l3_anchor, base.gap, fine.gap);
    });
  }

  const ComplexPoint mu{0.0, 0.5};
  const FockFunction sigma3_linear(
      "sigma3_deflated", [](ComplexPoint z) {
        static const std::array<LatticeIndex, 5> removed{{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}};
        return sigma::sigma_quotient_weighted(z, removed) * LogComplex::from_complex(z - Complex{4.5, 0.5});
      });
  const std::vector<DopleCase> dople_cases{
      {"lattice_kernel", kernel({1.0, 1.0}), times_linear(kernel({1.0, -1.0}), {mu}, "f2"), {0.5, 0.5}, mu},
      {"kernel_pair", kernel({0.3, 0.2}), times_linear(kernel({1.0, -1.0}), {mu}, "f2"), {0.4, 0.3}, mu},
      {"sigma3_deflated", kernel({1.0, 1.0}), sigma3_linear, {0.5, -0.5}, {4.5, 0.5}},
  };
  const std::string dople_anchor = "two-sided lattice identity";
  for (const DopleCase& c : dople_cases) {
    const std::string id = "dople." + c.name;
    b.guard(id, dople_anchor, [&] {
      const series::IdentityCheck base = series::dople_identity(c.f1, c.f2, c.z, c.mu, trunc, window(h));
      const series::IdentityCheck fine = series::dople_identity(c.f1, c.f2, c.z, c.mu, refined_trunc, window(h / 2.0));
      b.info(id + ".lhs", dople_anchor, base.lhs);
      b.bound(id + ".gap", dople_anchor, base.gap, 1e-4);
      decrease_row(b, id + ".refined_gap", dople_anchor, base.gap, fine.gap);
    });
  }

  const ComplexPoint l3{0.5, 0.5};
  const ComplexPoint l4{1.5, -0.3};
  const std::vector<E2Case> e2_cases{
      {"sigma3", times_linear(fock::sigma3_function(), {l3, l4}, "h2"), l3, l4, {0.3, 0.7}},
      {"kernel", times_linear(kernel({2.0, 1.0}), {{-0.5, 1.5}, l4}, "h2"), {-0.5, 1.5}, l4, {0.5, 0.5}},
      {"kernel_pair",
       times_linear(fock::linear_combination("pair", {{0.5, kernel({-1.0, 0.5})}, {1.0, kernel({0.3, -1.2})}}),
                    {l3, l4}, "h2"),
       l3, l4, {-0.5, 1.5}},
  };
  const std::string e2_anchor = "interpolation identity";
  for (const E2Case& c : e2_cases) {
    const std::string id = "e2." + c.name;
    b.guard(id, e2_anchor, [&] {
      const series::IdentityCheck base = series::interp_identity_e2(c.h2, c.l3, c.l4, c.z, trunc);
      const series::IdentityCheck fine = series::interp_identity_e2(c.h2, c.l3, c.l4, c.z, refined_trunc);
      b.info(id + ".lhs", e2_anchor, base.lhs);
      b.bound(id + ".gap", e2_anchor, base.gap, 1e-4);
      decrease_row(b, id + ".refined_gap", e2_anchor, base.gap, fine.gap);
    });
  }
  b.guard("e2.residue", "residue comparison", [&] {
    const E2Case& c = e2_cases[1];
    const series::ResidueCheck r = series::e2_residue(c.h2, c.l3, c.l4, {1, 0});
    b.info("e2.residue.lhs", "residue comparison", r.lhs);
    b.bound("e2.residue", "residue comparison", r.gap, 1e-6);
  });

  const std::string bio_anchor = "biorthogonal system of the lattice kernels";
  b.guard("biorthogonality.quadrature", bio_anchor, [&] {
    const std::vector<LatticeIndex> ws = sigma::lattice_points(4.0);
    double worst = 0.0;
    double worst_closed = 0.0;
    for (LatticeIndex v : ws) {
      const std::vector<series::CoefficientB> row =
          series::coeff_b_many(kernel(v.point()), ws, QuadratureSpec::localized(v.point(), 6.0, h));
      for (std::size_t k = 0; k < ws.size(); ++k) {
        const double delta = ws[k] == v ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(row[k].value - delta));
        worst_closed = std::max(worst_closed, std::abs(row[k].closed_form.value_or(kNaN) - delta));
      }
    }
    b.bound("biorthogonality.quadrature", bio_anchor, worst, 1e-6);
    b.bound("biorthogonality.closed_form", bio_anchor, worst_closed, 1e-8);
  });

  const std::string growth_anchor = "Fourier coefficient growth";
  QuadratureSpec wide;
  wide.truncation_radius = 24.0;
  wide.step = h;
  const std::vector<std::pair<std::string, FockFunction>> growth_cases{
      {"sigma3", fock::sigma3_function()},
      {"kernel", kernel({0.7, -0.4})},
      {"kernel_pair", lemma3_cases[2].f},
  };
  for (const auto& [name, f] : growth_cases) {
    const std::string id = "coefficient_growth." + name;
    b.guard(id, growth_anchor, [&] {
      const series::LatticeCoefficients bc = series::b_coefficients(f, 8.0, wide);
      b.bound(id, growth_anchor, bc.log_growth_constant(), 100.0);
      if (name == "sigma3") b.info("coefficient_b.sigma3(2+i)", growth_anchor, bc.entries.at({2, 1}));
    });
  }
  for (const Lemma3Case& c : lemma3_cases) {
    const std::string id = "l2_tail." + c.name;
    b.guard(id, "interpolation coefficients", [&] {
      const series::LatticeCoefficients a = series::a_coefficients(c.f, 12.0);
      b.bound(id, "interpolation coefficients", a.partial_l2(12.0) - a.partial_l2(10.0), 1e-6);
    });
  }

  const std::string cl3_anchor = "biorthogonal norm bound";
  b.guard("cl3.max_ratio", cl3_anchor, [&] {
    QuadratureSpec s;
    s.truncation_radius = 48.0;
    s.step = h;
    const series::Cl3Report r = series::check_cl3(8.0, s);
    double at1 = kNaN;
    double at8 = kNaN;
    double err = 0.0;
    for (const series::Cl3Entry& e : r.entries) {
      if (e.w == LatticeIndex{1, 0}) at1 = e.norm;
      if (e.w == LatticeIndex{8, 0}) at8 = e.norm;
      err = std::max(err, e.error_estimate / e.norm);
    }
    b.rule("cl3.max_ratio", cl3_anchor, r.max_ratio, 0.0, std::isfinite(r.max_ratio) && r.max_ratio > 0.0);
    b.info("cl3.norm(1)", cl3_anchor, at1);
    b.info("cl3.norm(8)", cl3_anchor, at8);
    b.rule("cl3.decay", cl3_anchor, at8, at1, at8 < at1);
    b.info("cl3.max_relative_error", cl3_anchor, err);
  });
  return b.finish();
}

// ------------------------------------------------------- build-counterexample

double deviation_closed_form(const FockFunction& f) {
  fock::KernelDecomposition d = *f.decomposition();
  d.sigma3_coefficient = {0.0, 0.0};
  const FockFunction rest = fock::from_decomposition("rest", d);
  return std::sqrt(std::max(0.0, fock::inner_product_closed_form(rest, rest).real()));
}

Panel counterexample_panel(const RunConfig& config) {
  PanelBuilder b("build-counterexample", "counterexample");
  const construction::ConstructionParams params = config.construction_params();
  const std::string anchor = "counterexample construction";
  std::optional<construction::ConstructionResult> result;
  b.guard("construction", anchor, [&] {
    result = construction::build_construction(params);
    b.rule("construction", anchor, 0.0, 0.0, true);
  });
  if (!result) return b.finish();
  const construction::ConstructionResult& r = *result;

  for (std::size_t n = 0; n < r.u.size(); ++n) {
    const std::string tag = "." + std::to_string(n + 1);
    b.info("u" + tag, anchor, r.u[n]);
    b.info("beta" + tag, "roots of F on the real axis", r.betas[n]);
    b.bound("beta" + tag + ".residual", "roots of F on the real axis", r.root_residuals[n], params.tol_root);
    b.info("v" + tag, anchor, r.vs[n]);
    b.rule("d" + tag, "coefficients of H", r.ds[n], 1.0, std::abs(r.ds[n]) < 1.0);
    b.info("gamma" + tag, "coefficients of H", Complex{r.solve.gamma[n], r.solve.gamma_imag[n]});
  }
  b.rule("solve.dominance", "coefficients of H", r.solve.dominance, 1.0, r.solve.dominance < 1.0);
  b.info("solve.condition", "coefficients of H", r.solve.condition);
  b.bound("solve.residual", "coefficients of H", r.solve.residual, params.tol_solve);
  b.bound("scan.mismatched_cells", "zeros of F", static_cast<double>(r.scan.mismatched_cells.size()), 0.0);
  b.info("scan.zeros", "zeros of F", static_cast<double>(r.scan.zeros.size()));
  b.bound("scan.max_residual", "zeros of F", r.scan.max_residual, params.tol_root);

  b.guard("verification", anchor, [&] {
    const construction::Verification v = construction::verify_properties(r);
    b.bound("p2.residual", "F vanishes on Lambda_2", v.p2_residual, 1e-8);
    b.bound("p3.residual", "H is orthogonal to the g_v", v.p3_residual, 1e-6);
    b.info("p3.error_estimate", "H is orthogonal to the g_v", v.p3_error);
    b.info("p4.value", "<F, H> is bounded below", v.p4_value);
    b.bound("p4.imag", "<F, H> is bounded below", v.p4_value.imag(), 1e-6);
    b.at_least("p4.real", "<F, H> is bounded below", v.p4_value.real(), 0.5 * v.sigma3_norm_sq);
    b.bound("p4.closed_form_gap", "<F, H> is bounded below", v.p4_value - v.p4_closed_form, 1e-6);
    b.info("sigma3.norm_sq", "<F, H> is bounded below", v.sigma3_norm_sq);
    b.info("deviation.f", "F and H stay close to sigma_3", v.f_deviation);
    b.info("deviation.h", "F and H stay close to sigma_3", v.h_deviation);
    b.info("deviation.constant", "F and H stay close to sigma_3", v.deviation_constant);
    b.bound("deviation.f.closed_form_gap", "F and H stay close to sigma_3",
            v.f_deviation - deviation_closed_form(r.F), 1e-6);
    b.bound("deviation.h.closed_form_gap", "F and H stay close to sigma_3",
            v.h_deviation - deviation_closed_form(r.H), 1e-6);
    for (std::size_t k = 0; k < v.g_norms.size(); ++k) {
      b.rule("g_norm(" + point_name(v.g_norm_points[k]) + ")", "g_lambda lies in the space", v.g_norms[k], 0.0,
             std::isfinite(v.g_norms[k]));
    }
    b.info("estimate.g_upper", "growth estimates", v.g_upper);
    b.rule("estimate.f_lower", "growth estimates", v.f_lower, 0.0, v.f_lower > 0.0);
    b.info("estimate.ratio_disk_low", "growth estimates", v.ratio_disk_low);
    b.info("estimate.ratio_disk_high", "growth estimates", v.ratio_disk_high);
    b.info("estimate.ratio_off_low", "growth estimates", v.ratio_off_low);
    b.info("estimate.ratio_off_high", "growth estimates", v.ratio_off_high);
    b.info("estimate.g_disk_low", "growth estimates", v.g_disk_low);
    b.at_least("estimate.lambda_min_modulus", "growth estimates", v.lambda_min_modulus, 0.5);
    b.bound("verification.failures", anchor, static_cast<double>(v.failures.size()), 0.0);

    // The same constant for twice the base, from the closed-form deviations.
    const int q2 = 2 * params.q;
    b.guard("deviation.constant.q" + std::to_string(q2), "F and H stay close to sigma_3", [&] {
      const construction::ConstructionResult r2 = construction::build_construction(config.construction_params(q2));
      const double c2 = (deviation_closed_form(r2.F) + deviation_closed_form(r2.H)) * std::cbrt(static_cast<double>(q2));
      b.info("deviation.constant.q" + std::to_string(q2), "F and H stay close to sigma_3", c2);
      b.bound("deviation.constant.stability", "F and H stay close to sigma_3", c2 / v.deviation_constant - 1.0, 0.5);
    });
  });

  if (r.vs.size() >= 3) {
    b.guard("lemma3.construction", "summation identity for three zeros", [&] {
      const series::DivisibleFunction g = construction::generating_function(r);
      // G vanishes on the lattice away from the v_n and the u_n, so the sum
      // runs over the window points where the factor is not negligible.
      const double radius = params.required_radius();
      std::vector<LatticeIndex> all = sigma::lattice_points(radius);
      std::vector<double> factor(all.size());
      double largest = 0.0;
      for (std::size_t k = 0; k < all.size(); ++k) {
        const ComplexPoint p = all[k].point();
        factor[k] = g.weighted(p).abs() / std::abs((p - r.vs[0]) * (p - r.vs[1]) * (p - r.vs[2]));
        largest = std::max(largest, factor[k]);
      }
      std::vector<LatticeIndex> ws;
      for (std::size_t k = 0; k < all.size(); ++k) {
        if (factor[k] > 1e-14 * largest) ws.push_back(all[k]);
      }
      QuadratureSpec wide;
      wide.truncation_radius = 24.0;
      wide.step = params.spec.step;
      const std::vector<series::CoefficientB> s3 = series::coeff_b_many(fock::sigma3_function(), ws, wide);
      series::LatticeCoefficients bh;
      bh.kind = series::CoefficientKind::b;
      bh.source_label = r.H.label();
      bh.truncation_radius = radius;
      for (std::size_t k = 0; k < ws.size(); ++k) {
        Complex acc = s3[k].value;
        for (const fock::KernelTerm& t : r.H.decomposition()->terms) {
          acc += std::conj(t.coefficient) * series::biorthogonal_weighted(ws[k], t.center).to_complex();
        }
        bh.entries[ws[k]] = acc;
      }
      const series::IdentityCheck c = series::lemma3_identity(g, r.vs[0], r.vs[1], r.vs[2], r.H, bh, params.spec);
      b.info("lemma3.construction.lhs", "summation identity for three zeros", c.lhs);
      b.info("lemma3.construction.rhs", "summation identity for three zeros", c.rhs);
      b.info("lemma3.construction.terms", "summation identity for three zeros", static_cast<double>(c.terms));
      b.bound("lemma3.construction.gap", "summation identity for three zeros", c.gap, 1e-4);
    });
  }
  return b.finish();
}

// ---------------------------------------------------------------- gram-defect

Panel gram_panel(const RunConfig& config) {
  PanelBuilder b("gram-defect", "gram");
  const construction::ConstructionParams params = config.construction_params();
  const std::string anchor = "finite sections of the mixed system";
  const std::vector<int>& sizes = config.section_sizes;

  b.guard("gram.construction", anchor, [&] {
    const construction::ConstructionResult r = construction::build_construction(params);
    const gram::MixedSystemSpec spec = gram::construction_system(r, sizes);
    const std::vector<gram::GramReport> reports = gram::defect_scan(spec, params.spec);
    double previous = std::numeric_limits<double>::infinity();
    for (const gram::GramReport& g : reports) {
      const std::string tag = "(" + std::to_string(g.section_size) + ")";
      b.info("sigma_min" + tag, anchor, g.sigma_min);
      b.info("sigma_2min" + tag, anchor, g.sigma_2min);
      b.info("conditioning" + tag, anchor, g.conditioning);
      b.bound("asymmetry" + tag, anchor, g.asymmetry, 1e-10);
      double nv = 0.0;
      for (Complex c : g.null_vector) nv += std::norm(c);
      b.bound("null_vector_norm" + tag, anchor, std::sqrt(nv) - 1.0, 1e-12);
      b.rule("sigma_min.nonincreasing" + tag, anchor, g.sigma_min, previous, g.sigma_min <= previous * (1.0 + 1e-12));
      previous = g.sigma_min;
    }
    const gram::GramReport& first = reports.front();
    const gram::GramReport& last = reports.back();
    b.at_least("sigma_min.drop", anchor, first.sigma_min / last.sigma_min, 10.0);
    b.rule("sigma_2min.drop", anchor, first.sigma_2min / last.sigma_2min, 2.0,
           first.sigma_2min / last.sigma_2min < 2.0);
    b.info("null_vector.correlation_with_H", anchor, gram::null_vector_correlation(last, spec, r.H, params.spec));
  });

  b.guard("control", anchor, [&] {
    const gram::MixedSystemSpec control =
        gram::kernel_system(gram::sparse_lattice_points(static_cast<std::size_t>(sizes.back())), sizes);
    for (const gram::GramReport& g : gram::defect_scan(control, params.spec)) {
      b.at_least("control.sigma_min(" + std::to_string(g.section_size) + ")", "well-separated kernels", g.sigma_min,
                 0.5);
    }
  });
  return b.finish();
}

}  // namespace

std::vector<std::pair<std::string, fock::FockFunction>> function_corpus() {
  std::vector<std::pair<std::string, FockFunction>> out;
  for (ComplexPoint c : std::vector<ComplexPoint>{{0, 0}, {1, 0}, {0, 1}, {1.5, -0.5}, {-2, 1}, {3, 2}}) {
    out.emplace_back("k(" + point_name(c) + ")", kernel(c));
  }
  out.emplace_back("K(0.5+0.5i)", fock::kernel_function({{0.5, 0.5}, false}));
  out.emplace_back("k(1)-k(i)", fock::linear_combination("k(1)-k(i)", {{1.0, kernel({1, 0})}, {-1.0, kernel({0, 1})}}));
  out.emplace_back("pair", fock::linear_combination("pair", {{Complex{0.3, 0.4}, kernel({0.2, 0})}, {2.0, kernel({-1, -1})}}));
  out.emplace_back("triple", fock::linear_combination("triple", {{0.5, kernel({0.25, 0.75})},
                                                                 {Complex{0.0, -0.2}, kernel({-1.2, -0.4})},
                                                                 {1.1, kernel({2.0, -1.5})}}));
  out.emplace_back("sigma3", fock::sigma3_function());
  out.emplace_back("sigma3+k(2)/2",
                   fock::linear_combination("sigma3+k(2)/2", {{1.0, fock::sigma3_function()}, {0.5, kernel({2, 0})}}));
  construction::ConstructionParams p;
  out.emplace_back("F(q=8)", construction::build_F(p));
  for (fock::GaborAtom a : std::vector<fock::GaborAtom>{{0, 0}, {1.5, 0.7}, {-2, 1.3}}) {
    out.emplace_back("gabor(" + format_number(a.x) + "," + format_number(a.y) + ")", fock::bargmann_gabor(a));
  }
  for (LatticeIndex w : std::vector<LatticeIndex>{{1, 0}, {1, 1}, {2, -1}}) {
    out.emplace_back("h(" + point_name(w.point()) + ")", series::biorthogonal_function(w));
  }
  const FockFunction k05 = kernel({0.5, 0});
  out.emplace_back("z*k(0.5)", FockFunction("z*k(0.5)", [k05](ComplexPoint z) {
                     return k05.weighted(z) * LogComplex::from_complex(z);
                   }));
  return out;
}

std::vector<Panel> run_suite(Command command, const RunConfig& config) {
  switch (command) {
    case Command::verify_fock:
      return {reproducing_panel(config), bargmann_panel(config)};
    case Command::verify_sigma:
      return {sigma_panel()};
    case Command::check_identities:
      return {identities_panel(config)};
    case Command::build_counterexample:
      return {counterexample_panel(config)};
    case Command::gram_defect:
      return {gram_panel(config)};
    case Command::all:
      break;
  }
  throw ConfigError("run_suite: 'all' must be expanded first");
}

}  // namespace fockgabor::cli
