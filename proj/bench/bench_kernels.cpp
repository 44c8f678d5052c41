// Serial reference path against the OpenMP kernels. Each benchmark first
// checks that both paths agree bit for bit.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <map>

#include "sobext/distance.hpp"
#include "sobext/domain.hpp"
#include "sobext/perimeter.hpp"
#include "sobext/sets.hpp"

using namespace sobext;

namespace {

const VoxelDomain& disk(int k) {
  static std::map<int, VoxelDomain> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, build_domain(GeneratorSpec::parse("ball"), k)).first;
  return it->second;
}

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

void require(bool ok, const char* what) {
  if (!ok) {
    std::cerr << "serial and parallel results differ: " << what << "\n";
    std::exit(1);
  }
}

void BM_DistanceTransform(benchmark::State& st) {
  const VoxelDomain& dom = disk(static_cast<int>(st.range(0)));
  require(distance_transform(dom, Exec::Serial).sq == distance_transform(dom, Exec::Parallel).sq, "edt");
  for (auto _ : st) benchmark::DoNotOptimize(distance_transform(dom, exec_of(st)).sq.data());
  st.counters["cells"] = static_cast<double>(dom.grid.cells());
}

void BM_BoundaryFaces(benchmark::State& st) {
  const VoxelDomain& dom = disk(static_cast<int>(st.range(0)));
  const VoxelSet a = make_set(dom.grid, build_set(dom, SetSpec::parse("half")), &dom);
  require(boundary_faces(a, &dom, Exec::Serial).faces.size() ==
              boundary_faces(a, &dom, Exec::Parallel).faces.size(),
          "faces");
  for (auto _ : st) benchmark::DoNotOptimize(boundary_faces(a, &dom, exec_of(st)).faces.data());
}

void BM_WeightedIntegral(benchmark::State& st) {
  const VoxelDomain& dom = disk(static_cast<int>(st.range(0)));
  const VoxelSet a = make_set(dom.grid, build_set(dom, SetSpec::parse("half")), &dom);
  const BoundaryFaceSet faces = boundary_faces(a, &dom);
  const DistanceField df = distance_transform(dom);
  const auto s = weighted_boundary_integral(faces, df, 1.5, Exec::Serial);
  const auto p = weighted_boundary_integral(faces, df, 1.5, Exec::Parallel);
  require(s.finite == p.finite && s.touching == p.touching, "weighted integral");
  for (auto _ : st) benchmark::DoNotOptimize(weighted_boundary_integral(faces, df, 1.5, exec_of(st)).finite);
  st.counters["faces"] = static_cast<double>(faces.faces.size());
}

void args(benchmark::internal::Benchmark* b) {
  for (int k : {9, 10, 11})
    for (int par : {0, 1}) b->Args({k, par});
  b->ArgNames({"K", "parallel"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_DistanceTransform)->Apply(args);
BENCHMARK(BM_BoundaryFaces)->Apply(args);
BENCHMARK(BM_WeightedIntegral)->Apply(args);

int main(int argc, char** argv) {
  std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 2;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
