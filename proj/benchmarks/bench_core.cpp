#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fockgabor/fock.hpp"
#include "fockgabor/lattice_series.hpp"
#include "fockgabor/mixed_gram.hpp"
#include "fockgabor/quadrature.hpp"
#include "fockgabor/weierstrass.hpp"

using namespace fockgabor;

namespace {

QuadratureSpec window(double radius, double step) {
  QuadratureSpec s;
  s.truncation_radius = radius;
  s.step = step;
  return s;
}

void BM_KernelWeightedEval(benchmark::State& state) {
  const fock::KernelSpec k{{2.0, 1.0}, true};
  ComplexPoint z{0.3, -0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fock::kernel_weighted_eval(k, z));
    z += ComplexPoint(1e-9, 0.0);
  }
}
BENCHMARK(BM_KernelWeightedEval);

void BM_SigmaWeighted(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0));
  ComplexPoint z{r + 0.5, 0.25};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigma::sigma_weighted(z));
    z += ComplexPoint(1e-9, 0.0);
  }
}
BENCHMARK(BM_SigmaWeighted)->Arg(0)->Arg(10)->Arg(40);

void BM_IntegratePlaneGaussian(benchmark::State& state) {
  const QuadratureSpec s = window(static_cast<double>(state.range(0)), 0.05);
  const PlaneIntegrand g = [](ComplexPoint z) { return LogComplex::from_polar(-std::norm(z), 0.0); };
  for (auto _ : state) benchmark::DoNotOptimize(integrate_plane(g, s));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * s.node_count()));
}
BENCHMARK(BM_IntegratePlaneGaussian)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ClosedFormInner(benchmark::State& state) {
  const fock::FockFunction f = fock::kernel_function({{1.0, 2.0}, true});
  const fock::FockFunction g = fock::kernel_function({{-0.5, 0.25}, true});
  for (auto _ : state) benchmark::DoNotOptimize(fock::inner_product_closed_form(f, g));
}
BENCHMARK(BM_ClosedFormInner);

void BM_JacobiSvd(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const gram::MixedSystemSpec spec = gram::kernel_system(gram::sparse_lattice_points(n), {static_cast<int>(n)});
  const gram::GramMatrix m = gram::gram_matrix(spec, n, window(8.0, 0.05));
  for (auto _ : state) benchmark::DoNotOptimize(gram::jacobi_svd(m));
}
BENCHMARK(BM_JacobiSvd)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_BiorthogonalWeighted(benchmark::State& state) {
  const sigma::LatticeIndex w{2, 1};
  ComplexPoint z{0.3, 0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(series::biorthogonal_weighted(w, z));
    z += ComplexPoint(1e-9, 0.0);
  }
}
BENCHMARK(BM_BiorthogonalWeighted);

}  // namespace

BENCHMARK_MAIN();
