#include <benchmark/benchmark.h>

#include "acms/assembly.hpp"
#include "acms/coefficient.hpp"
#include "acms/corrector.hpp"
#include "acms/geometry.hpp"
#include "acms/methods.hpp"
#include "acms/spectral.hpp"
#include "acms/substructure.hpp"

namespace {

using namespace acms;

struct Problem {
  TwoLevelMesh mesh;
  CoefficientField field;

  Problem(int n, int r)
      : mesh(refine(build_coarse_mesh(n), r)),
        field(build_field(mesh, PatternSpec::parse("random_checkerboard:1,1e4,32,7"),
                          WeightSpec::parse("constant:1"))) {}
};

void BM_Assemble(benchmark::State& state) {
  const Problem p(8, static_cast<int>(state.range(0)));
  const Vector g = Vector::Ones(p.mesh.num_fine_nodes());
  for (auto _ : state) benchmark::DoNotOptimize(assemble(p.mesh, p.field, g));
  state.counters["fine_nodes"] = p.mesh.num_fine_nodes();
}
BENCHMARK(BM_Assemble)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_HarmonicExtender(benchmark::State& state) {
  const Problem p(8, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const HarmonicExtender ext(p.mesh, p.field);
    benchmark::DoNotOptimize(ext.num_elements());
  }
}
BENCHMARK(BM_HarmonicExtender)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_EdgeSpectra(benchmark::State& state) {
  const Problem p(8, static_cast<int>(state.range(0)));
  const HarmonicExtender ext(p.mesh, p.field);
  for (auto _ : state) benchmark::DoNotOptimize(edge_spectra(p.mesh, ext, p.mesh.coarse.H, 4.0));
}
BENCHMARK(BM_EdgeSpectra)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_LodBasis(benchmark::State& state) {
  const Problem p(8, 3);
  const HarmonicExtender ext(p.mesh, p.field);
  const SparseMatrix s = ext.skeleton_matrix();
  const int layers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const CorrectorSolver solver(p.mesh, ext, s, CorrectorSubspace::full(p.mesh));
    benchmark::DoNotOptimize(build_multiscale_basis(Method::lod, p.mesh, solver, layers, 0.0));
  }
}
BENCHMARK(BM_LodBasis)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
