// Serial reference vs OpenMP kernels.

#include <random>

#include <benchmark/benchmark.h>

#include "shape3d/kernels.hpp"
#include "shape3d/primitives.hpp"

namespace {

using namespace shape3d;

std::vector<Vec3> cloud(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<Vec3> points(n);
  for (auto& p : points) p = Vec3(g(rng), g(rng), g(rng));
  return points;
}

void BM_DiameterSerial(benchmark::State& state) {
  const auto points = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::max_pairwise_distance(points));
}

void BM_DiameterOmp(benchmark::State& state) {
  const auto points = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::max_pairwise_distance(points));
}

struct ScanData {
  std::vector<double> query, corpus, weights;
};

ScanData scan_data(std::size_t rows) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  ScanData d;
  d.query.resize(kDescriptorDims);
  d.weights.assign(kDescriptorDims, 1.0);
  d.corpus.resize(rows * kDescriptorDims);
  for (auto& v : d.query) v = g(rng);
  for (auto& v : d.corpus) v = g(rng);
  return d;
}

void BM_ScanSerial(benchmark::State& state) {
  const auto d = scan_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::distance_scan(d.query, d.corpus, d.weights));
}

void BM_ScanOmp(benchmark::State& state) {
  const auto d = scan_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::distance_scan(d.query, d.corpus, d.weights));
}

std::vector<Mesh> corpus(std::size_t n) {
  std::mt19937_64 rng(3);
  std::vector<Mesh> meshes;
  for (std::size_t i = 0; i < n; ++i) meshes.push_back(primitives::perturbed(primitives::icosphere(3), 0.01, rng));
  return meshes;
}

void BM_ExtractSerial(benchmark::State& state) {
  const auto meshes = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::extract_descriptors(meshes));
}

void BM_ExtractOmp(benchmark::State& state) {
  const auto meshes = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::extract_descriptors(meshes));
}

}  // namespace

BENCHMARK(BM_DiameterSerial)->Arg(1000)->Arg(8000);
BENCHMARK(BM_DiameterOmp)->Arg(1000)->Arg(8000);
BENCHMARK(BM_ScanSerial)->Arg(2000)->Arg(100000);
BENCHMARK(BM_ScanOmp)->Arg(2000)->Arg(100000);
BENCHMARK(BM_ExtractSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractOmp)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
