#include "fockgabor/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace fockgabor {

namespace {

constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

struct Compensated {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  void add(const Compensated& other) {
    add(other.sum);
    add(other.carry);
  }
  double value() const { return sum + carry; }
};

struct ComponentAccumulator {
  Compensated re, im;
  Compensated diff_re, diff_im;
  double abs_sum = 0.0;
  double ring_abs_sum = 0.0;

  void add(Complex w) {
    re.add(w.real());
    im.add(w.imag());
  }
  void merge(const ComponentAccumulator& o) {
    re.add(o.re);
    im.add(o.im);
    diff_re.add(o.diff_re);
    diff_im.add(o.diff_im);
    abs_sum += o.abs_sum;
    ring_abs_sum += o.ring_abs_sum;
  }
};

struct RowTotals {
  std::vector<ComponentAccumulator> parts;
  std::size_t ring_cells = 0;
  std::size_t sampled_cells = 0;
};

class GridRunner {
 public:
  GridRunner(const VectorIntegrand& f, std::size_t components, const QuadratureSpec& spec)
      : f_(f), k_(components), spec_(spec), m_(spec.cells_per_side()) {
    half_ = 0.5 * spec.step * static_cast<double>(m_);
  }

  std::vector<QuadratureResult> run() {
    std::vector<RowTotals> rows(m_);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, m_);
    if (workers <= 1) {
      for (std::size_t j = 0; j < m_; ++j) rows[j] = run_row(j);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t j = w; j < m_; j += workers) rows[j] = run_row(j);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    std::vector<ComponentAccumulator> total(k_);
    std::size_t ring_cells = 0;
    std::size_t sampled_cells = 0;
    for (const RowTotals& r : rows) {
      for (std::size_t c = 0; c < k_; ++c) total[c].merge(r.parts[c]);
      ring_cells += r.ring_cells;
      sampled_cells += r.sampled_cells;
    }

    const double cells = static_cast<double>(m_) * static_cast<double>(m_);
    const double extrapolate = sampled_cells > 0 ? cells / static_cast<double>(sampled_cells) : 0.0;
    const double r = spec_.truncation_radius;
    std::vector<QuadratureResult> out(k_);
    for (std::size_t c = 0; c < k_; ++c) {
      QuadratureResult& q = out[c];
      q.value = {total[c].re.value(), total[c].im.value()};
      const double ring_mean = ring_cells > 0 ? total[c].ring_abs_sum / static_cast<double>(ring_cells) : 0.0;
      q.tail_bound = gaussian_tail_bound(r) + 4.0 * r * r * ring_mean;
      q.richardson = extrapolate * std::abs(Complex{total[c].diff_re.value(), total[c].diff_im.value()});
      q.rounding = 64.0 * kEpsilon * total[c].abs_sum;
      q.error_estimate = q.tail_bound + q.richardson + q.rounding;
      q.nodes = spec_.node_count();
    }
    return out;
  }

 private:
  bool refined(ComplexPoint c) const {
    if (spec_.refinement_factor <= 1) return false;
    const double rr = spec_.refinement_radius * spec_.refinement_radius;
    for (ComplexPoint p : spec_.centers) {
      if (std::norm(c - p) <= rr) return true;
    }
    return false;
  }

  // Midpoint sum over the cell split into sub x sub pieces.
  void cell_sum(ComplexPoint center, int sub, std::span<Complex> out, std::span<Complex> scratch) const {
    std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
    const double hs = spec_.step / sub;
    const double area = hs * hs;
    for (int b = 0; b < sub; ++b) {
      for (int a = 0; a < sub; ++a) {
        const ComplexPoint z{center.real() - 0.5 * spec_.step + (a + 0.5) * hs,
                             center.imag() - 0.5 * spec_.step + (b + 0.5) * hs};
        f_(z, scratch);
        for (std::size_t c = 0; c < k_; ++c) {
          if (!std::isfinite(scratch[c].real()) || !std::isfinite(scratch[c].imag())) throw NonFiniteSample(z);
          out[c] += scratch[c] * area;
        }
      }
    }
  }

  RowTotals run_row(std::size_t j) const {
    RowTotals row;
    row.parts.resize(k_);
    std::vector<Complex> value(k_), fine(k_), scratch(k_);
    const double h = spec_.step;
    const double y = spec_.origin.imag() - half_ + (static_cast<double>(j) + 0.5) * h;
    const bool edge_row = j == 0 || j + 1 == m_;
    for (std::size_t i = 0; i < m_; ++i) {
      const ComplexPoint c{spec_.origin.real() - half_ + (static_cast<double>(i) + 0.5) * h, y};
      const int sub = refined(c) ? spec_.refinement_factor : 1;
      cell_sum(c, sub, value, scratch);
      const bool ring = edge_row || i == 0 || i + 1 == m_;
      const bool sampled = (i + 3 * j) % 10 == 0;
      if (sampled) cell_sum(c, 2 * sub, fine, scratch);
      for (std::size_t k = 0; k < k_; ++k) {
        ComponentAccumulator& acc = row.parts[k];
        acc.add(value[k]);
        const double mag = std::abs(value[k]);
        acc.abs_sum += mag;
        if (ring) acc.ring_abs_sum += mag / (h * h);
        if (sampled) {
          acc.diff_re.add(fine[k].real() - value[k].real());
          acc.diff_im.add(fine[k].imag() - value[k].imag());
        }
      }
      if (ring) ++row.ring_cells;
      if (sampled) ++row.sampled_cells;
    }
    return row;
  }

  const VectorIntegrand& f_;
  std::size_t k_;
  const QuadratureSpec& spec_;
  std::size_t m_;
  double half_ = 0.0;
};

}  // namespace

NonFiniteSample::NonFiniteSample(ComplexPoint node)
    : NumericalFailure([&] {
        std::ostringstream os;
        os.precision(17);
        os << "integrate_plane: non-finite integrand at node (" << node.real() << ", " << node.imag() << ")";
        return os.str();
      }()),
      node_(node) {}

void QuadratureSpec::validate() const {
  if (!(truncation_radius > 0.0) || !std::isfinite(truncation_radius)) {
    throw DomainError("QuadratureSpec: truncation radius must be positive and finite");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("QuadratureSpec: step must be positive and finite");
  if (refinement_factor < 1) throw DomainError("QuadratureSpec: refinement factor must be >= 1");
  if (!(refinement_radius >= 0.0)) throw DomainError("QuadratureSpec: refinement radius must be >= 0");
  require_finite(origin, "QuadratureSpec origin");
  for (ComplexPoint c : centers) require_finite(c, "QuadratureSpec center");
  if (2.0 * truncation_radius / step > 1e5) throw DomainError("QuadratureSpec: grid exceeds 1e5 cells per side");
}

std::size_t QuadratureSpec::cells_per_side() const {
  return static_cast<std::size_t>(std::ceil(2.0 * truncation_radius / step - 1e-9));
}

std::size_t QuadratureSpec::node_count() const {
  const std::size_t m = cells_per_side();
  std::size_t total = m * m;
  if (refinement_factor > 1 && !centers.empty()) {
    const double rr = refinement_radius * refinement_radius;
    const double half = 0.5 * step * static_cast<double>(m);
    const std::size_t extra = static_cast<std::size_t>(refinement_factor * refinement_factor - 1);
    for (std::size_t j = 0; j < m; ++j) {
      const double y = origin.imag() - half + (static_cast<double>(j) + 0.5) * step;
      for (std::size_t i = 0; i < m; ++i) {
        const ComplexPoint c{origin.real() - half + (static_cast<double>(i) + 0.5) * step, y};
        for (ComplexPoint p : centers) {
          if (std::norm(c - p) <= rr) {
            total += extra;
            break;
          }
        }
      }
    }
  }
  return total;
}

QuadratureSpec QuadratureSpec::covering(std::span<const ComplexPoint> points, double step) {
  QuadratureSpec spec;
  double far = 0.0;
  for (ComplexPoint p : points) far = std::max(far, std::abs(p));
  spec.truncation_radius = std::max(8.0, std::ceil(far + 6.0));
  spec.step = step;
  return spec;
}

QuadratureSpec QuadratureSpec::localized(ComplexPoint origin, double radius, double step) {
  QuadratureSpec spec;
  spec.origin = origin;
  spec.truncation_radius = radius;
  spec.step = step;
  return spec;
}

double gaussian_tail_bound(double radius) { return std::exp(-kPi * radius * radius / 4.0); }

std::vector<QuadratureResult> integrate_plane(const VectorIntegrand& integrand, std::size_t components,
                                              const QuadratureSpec& spec) {
  spec.validate();
  if (components == 0) return {};
  GridRunner runner(integrand, components, spec);
  return runner.run();
}

QuadratureResult integrate_plane(const PlaneIntegrand& integrand, const QuadratureSpec& spec) {
  const VectorIntegrand wrapped = [&integrand](ComplexPoint z, std::span<Complex> out) {
    out[0] = integrand(z).to_complex();
  };
  return integrate_plane(wrapped, 1, spec).front();
}

}  // namespace fockgabor
