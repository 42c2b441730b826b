#include "shape3d/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <omp.h>

#include "shape3d/error.hpp"

namespace shape3d::kernels {
namespace {

void check_scan(std::span<const double> query, std::span<const double> corpus,
                std::span<const double> weights) {
  if (query.empty() || corpus.size() % query.size() != 0 || weights.size() != query.size()) {
    throw Error(ErrorCode::DimensionMismatch, "distance scan shapes disagree");
  }
}

double weighted_sq(const double* a, const double* b, const double* w, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += w[i] * d * d;
  }
  return sum;
}

Extraction extract_one(const Mesh& mesh) {
  const auto start = std::chrono::steady_clock::now();
  Extraction out;
  try {
    out.result = descriptor_vector(mesh);
  } catch (const std::exception& e) {
    out.result = std::string(e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

namespace serial {

double max_pairwise_distance(std::span<const Vec3> points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, (points[i] - points[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

std::vector<double> distance_scan(std::span<const double> query, std::span<const double> corpus,
                                  std::span<const double> weights) {
  check_scan(query, corpus, weights);
  const std::size_t dim = query.size();
  const std::size_t rows = corpus.size() / dim;
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = std::sqrt(weighted_sq(query.data(), corpus.data() + r * dim, weights.data(), dim));
  }
  return out;
}

std::vector<Extraction> extract_descriptors(std::span<const Mesh> meshes) {
  std::vector<Extraction> out;
  out.reserve(meshes.size());
  for (const auto& m : meshes) out.push_back(extract_one(m));
  return out;
}

}  // namespace serial

namespace omp {

double max_pairwise_distance(std::span<const Vec3> points) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  double best = 0.0;
  // max is exact, so the reduction order does not matter.
#pragma omp parallel for reduction(max : best) schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec3 p = points[i];
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      best = std::max(best, (p - points[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

std::vector<double> distance_scan(std::span<const double> query, std::span<const double> corpus,
                                  std::span<const double> weights) {
  check_scan(query, corpus, weights);
  const std::size_t dim = query.size();
  const auto rows = static_cast<std::ptrdiff_t>(corpus.size() / dim);
  std::vector<double> out(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    out[r] = std::sqrt(weighted_sq(query.data(), corpus.data() + r * dim, weights.data(), dim));
  }
  return out;
}

std::vector<Extraction> extract_descriptors(std::span<const Mesh> meshes) {
  const auto n = static_cast<std::ptrdiff_t>(meshes.size());
  std::vector<Extraction> out(meshes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = extract_one(meshes[i]);
  return out;
}

}  // namespace omp
}  // namespace shape3d::kernels
