#include "fockgabor/mixed_gram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fockgabor/errors.hpp"

namespace fockgabor::gram {

namespace {

std::string point_label(const char* prefix, ComplexPoint z) {
  std::ostringstream os;
  os.precision(6);
  os << prefix << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
  return os.str();
}

bool by_modulus(ComplexPoint a, ComplexPoint b) {
  const double na = std::norm(a);
  const double nb = std::norm(b);
  if (na != nb) return na < nb;
  return std::arg(a) < std::arg(b);
}

// Raw Gram block and values of the general vectors.
struct GeneralData {
  std::vector<Complex> block;
  std::vector<double> scale;
};

GeneralData general_block(const MixedSystemSpec& spec, const QuadratureSpec& quad) {
  const std::size_t k = spec.general_count;
  GeneralData out;
  if (k == 0) return out;
  const std::size_t pairs = k * (k + 1) / 2;
  const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> o) {
    std::vector<Complex> v(k);
    spec.joint(z, v);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) o[idx++] = v[i] * std::conj(v[j]);
    }
  };
  const std::vector<QuadratureResult> q = integrate_plane(integrand, pairs, quad);
  out.block.assign(k * k, Complex{0.0, 0.0});
  std::size_t idx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      out.block[i * k + j] = q[idx].value;
      out.block[j * k + i] = std::conj(q[idx].value);
      ++idx;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double sq = out.block[i * k + i].real();
    if (!(sq > 0.0)) throw NumericalFailure("gram: general vector " + std::to_string(i) + " has no positive norm");
    out.scale.push_back(1.0 / std::sqrt(sq));
  }
  return out;
}

}  // namespace

void MixedSystemSpec::validate() const {
  for (ComplexPoint a : lambda1) {
    for (ComplexPoint b : lambda2) {
      if (std::abs(a - b) < 1e-9) throw DomainError("mixed system: Lambda_1 and Lambda_2 intersect");
    }
  }
  for (const MixedVector& v : vectors) {
    if (!v.is_kernel && v.general_index >= general_count) throw DomainError("mixed system: bad general index");
  }
  if (general_count > 0 && !joint) throw DomainError("mixed system: general vectors without an evaluator");
  int previous = 0;
  for (int s : section_sizes) {
    if (s <= previous) throw DomainError("mixed system: section sizes must be positive and increasing");
    if (static_cast<std::size_t>(s) > vectors.size()) {
      throw DomainError("mixed system: section size " + std::to_string(s) + " exceeds the " +
                        std::to_string(vectors.size()) + " available vectors");
    }
    previous = s;
  }
}

MixedSystemSpec construction_system(const construction::ConstructionResult& result, std::vector<int> section_sizes) {
  MixedSystemSpec spec;
  spec.lambda1 = result.lambda1;
  spec.lambda2 = result.lambda2;
  std::sort(spec.lambda2.begin(), spec.lambda2.end(), by_modulus);
  std::vector<std::size_t> order(spec.lambda1.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return by_modulus(spec.lambda1[a], spec.lambda1[b]); });

  std::size_t i2 = 0;
  std::size_t i1 = 0;
  while (i2 < spec.lambda2.size() || i1 < order.size()) {
    if (i2 < spec.lambda2.size()) {
      spec.vectors.push_back({point_label("k", spec.lambda2[i2]), spec.lambda2[i2], true, 0});
      ++i2;
    }
    if (i1 < order.size()) {
      const std::size_t n = order[i1];
      spec.vectors.push_back({point_label("g", spec.lambda1[n]), spec.lambda1[n], false, n});
      ++i1;
    }
  }
  spec.general_count = result.lambda1.size();
  std::shared_ptr<const construction::Model> model = result.model;
  spec.joint = [model](ComplexPoint z, std::span<Complex> out) {
    const construction::NodeValues v = model->node(z);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = model->weighted_g_v(n, z, v);
  };
  spec.section_sizes = std::move(section_sizes);
  spec.validate();
  return spec;
}

MixedSystemSpec kernel_system(std::vector<ComplexPoint> points, std::vector<int> section_sizes) {
  MixedSystemSpec spec;
  for (ComplexPoint p : points) spec.vectors.push_back({point_label("k", p), p, true, 0});
  spec.lambda2 = std::move(points);
  spec.section_sizes = std::move(section_sizes);
  spec.validate();
  return spec;
}

std::vector<ComplexPoint> sparse_lattice_points(std::size_t count) {
  std::vector<ComplexPoint> out{{0.0, 0.0}};
  for (double radius = 2.0; out.size() < count; radius *= 2.0) {
    out = {{0.0, 0.0}};
    for (sigma::LatticeIndex w : sigma::lattice_points(radius)) out.push_back(2.0 * w.point());
  }
  out.resize(count);
  return out;
}

GramMatrix GramMatrix::leading(std::size_t n) const {
  if (n > size) throw DomainError("GramMatrix::leading: size out of range");
  GramMatrix out;
  out.size = n;
  out.asymmetry = asymmetry;
  out.entries.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = (*this)(i, j);
  }
  return out;
}

GramMatrix gram_matrix(const MixedSystemSpec& spec, std::size_t size, const QuadratureSpec& quad) {
  spec.validate();
  if (size == 0 || size > spec.vectors.size()) throw DomainError("gram_matrix: size out of range");
  bool needs_general = false;
  for (std::size_t i = 0; i < size; ++i) needs_general = needs_general || !spec.vectors[i].is_kernel;
  const GeneralData general = needs_general ? general_block(spec, quad) : GeneralData{};
  const std::size_t k = spec.general_count;

  GramMatrix g;
  g.size = size;
  g.entries.assign(size * size, Complex{0.0, 0.0});
  std::vector<Complex> values(k);
  for (std::size_t j = 0; j < size; ++j) {
    const MixedVector& vj = spec.vectors[j];
    if (!vj.is_kernel) continue;
    // Column j: <v_i, k_{lambda_j}> is v_i evaluated at lambda_j.
    if (needs_general) spec.joint(vj.point, values);
    for (std::size_t i = 0; i < size; ++i) {
      const MixedVector& vi = spec.vectors[i];
      g(i, j) = vi.is_kernel ? fock::kernel_weighted_eval({vi.point, true}, vj.point).to_complex()
                             : general.scale[vi.general_index] * values[vi.general_index];
    }
  }
  for (std::size_t j = 0; j < size; ++j) {
    const MixedVector& vj = spec.vectors[j];
    if (vj.is_kernel) continue;
    for (std::size_t i = 0; i < size; ++i) {
      const MixedVector& vi = spec.vectors[i];
      if (vi.is_kernel) {
        g(i, j) = std::conj(g(j, i));
      } else {
        g(i, j) = general.scale[vi.general_index] * general.scale[vj.general_index] *
                  general.block[vi.general_index * k + vj.general_index];
      }
    }
  }
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i; j < size; ++j) {
      g.asymmetry = std::max(g.asymmetry, std::abs(g(i, j) - std::conj(g(j, i))));
      const Complex avg = 0.5 * (g(i, j) + std::conj(g(j, i)));
      g(i, j) = avg;
      g(j, i) = std::conj(avg);
    }
  }
  return g;
}

SvdResult jacobi_svd(const GramMatrix& m) {
  const std::size_t n = m.size;
  std::vector<Complex> a = m.entries;
  std::vector<Complex> v(n * n, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto col = [n](std::vector<Complex>& x, std::size_t r, std::size_t c) -> Complex& { return x[r * n + c]; };

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        Complex gamma{0.0, 0.0};
        for (std::size_t r = 0; r < n; ++r) {
          alpha += std::norm(col(a, r, p));
          beta += std::norm(col(a, r, q));
          gamma += std::conj(col(a, r, p)) * col(a, r, q);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Complex phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < n; ++r) {
          const Complex ap = col(a, r, p);
          const Complex aq = col(a, r, q) * std::conj(phase);
          col(a, r, p) = c * ap - s * aq;
          col(a, r, q) = (s * ap + c * aq) * phase;
          const Complex vp = col(v, r, p);
          const Complex vq = col(v, r, q) * std::conj(phase);
          col(v, r, p) = c * vp - s * vq;
          col(v, r, q) = (s * vp + c * vq) * phase;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t c = 0; c < n; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += std::norm(col(a, r, c));
    sv[c] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sv[x] > sv[y]; });
  SvdResult out;
  out.right_vectors.resize(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    out.singular_values.push_back(sv[order[c]]);
    for (std::size_t r = 0; r < n; ++r) out.right_vectors[r * n + c] = v[r * n + order[c]];
  }
  return out;
}

GramReport analyse(const GramMatrix& m) {
  const SvdResult svd = jacobi_svd(m);
  const std::size_t n = m.size;
  GramReport report;
  report.section_size = n;
  report.singular_values = svd.singular_values;
  report.sigma_min = svd.singular_values.back();
  report.sigma_2min = n >= 2 ? svd.singular_values[n - 2] : report.sigma_min;
  report.conditioning = report.sigma_min > 0.0 ? svd.singular_values.front() / report.sigma_min
                                               : std::numeric_limits<double>::infinity();
  report.asymmetry = m.asymmetry;
  // Coefficients a with ||sum a_i v_i||^2 = sigma_min are the conjugated
  // singular vector.
  std::vector<Complex> c(n);
  double norm = 0.0;
  std::size_t lead = 0;
  for (std::size_t r = 0; r < n; ++r) {
    c[r] = std::conj(svd.right_vectors[r * n + (n - 1)]);
    norm += std::norm(c[r]);
    if (std::abs(c[r]) > std::abs(c[lead]) + 1e-14) lead = r;
  }
  const Complex fix = std::abs(c[lead]) > 0.0 ? std::conj(c[lead]) / std::abs(c[lead]) : Complex{1.0, 0.0};
  for (Complex& x : c) x *= fix / std::sqrt(norm);
  report.null_vector = std::move(c);
  return report;
}

std::vector<GramReport> defect_scan(const MixedSystemSpec& spec, const QuadratureSpec& quad) {
  spec.validate();
  if (spec.section_sizes.empty()) throw DomainError("defect_scan: no section sizes");
  const GramMatrix full = gram_matrix(spec, static_cast<std::size_t>(spec.section_sizes.back()), quad);
  std::vector<GramReport> out;
  for (int s : spec.section_sizes) out.push_back(analyse(full.leading(static_cast<std::size_t>(s))));
  return out;
}

double null_vector_correlation(const GramReport& report, const MixedSystemSpec& spec, const FockFunction& candidate,
                               const QuadratureSpec& quad) {
  const std::size_t n = report.section_size;
  if (report.null_vector.size() != n || n > spec.vectors.size()) {
    throw DomainError("null_vector_correlation: report does not match the system");
  }
  const std::size_t k = spec.general_count;
  // Components: <g_k, candidate>, ||g_k||^2, ||candidate||^2.
  const VectorIntegrand integrand = [&](ComplexPoint z, std::span<Complex> o) {
    const Complex c = candidate.weighted_value(z);
    std::vector<Complex> v(k);
    if (k > 0) spec.joint(z, v);
    for (std::size_t i = 0; i < k; ++i) {
      o[i] = v[i] * std::conj(c);
      o[k + i] = std::norm(v[i]);
    }
    o[2 * k] = std::norm(c);
  };
  const std::vector<QuadratureResult> q = integrate_plane(integrand, 2 * k + 1, quad);
  const double cand_norm = std::sqrt(std::max(0.0, q[2 * k].value.real()));
  if (!(cand_norm > 0.0)) throw DomainError("null_vector_correlation: zero candidate");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const MixedVector& v = spec.vectors[i];
    const Complex inner = v.is_kernel ? std::conj(candidate.weighted_value(v.point))
                                      : q[v.general_index].value / std::sqrt(q[k + v.general_index].value.real());
    acc += report.null_vector[i] * inner;
  }
  const double combo_norm = std::sqrt(std::max(report.sigma_min, 0.0));
  if (!(combo_norm > 0.0)) return 1.0;
  return std::min(1.0, std::abs(acc) / (combo_norm * cand_norm));
}

}  // namespace fockgabor::gram
