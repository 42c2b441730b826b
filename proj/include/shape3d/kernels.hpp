#pragma once

// Data-parallel kernels. Each has a serial reference in `serial` and an
// OpenMP version in `omp`; both produce identical results for any thread count.

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "shape3d/descriptors.hpp"

namespace shape3d::kernels {

using DescriptorOrError = std::variant<DescriptorVector, std::string>;

struct Extraction {
  DescriptorOrError result;
  double seconds = 0.0;
};

namespace serial {
double max_pairwise_distance(std::span<const Vec3> points);
std::vector<double> distance_scan(std::span<const double> query, std::span<const double> corpus,
                                  std::span<const double> weights);
std::vector<Extraction> extract_descriptors(std::span<const Mesh> meshes);
}  // namespace serial

namespace omp {
double max_pairwise_distance(std::span<const Vec3> points);
/// corpus is row-major with query.size() columns; weights are per component.
std::vector<double> distance_scan(std::span<const double> query, std::span<const double> corpus,
                                  std::span<const double> weights);
std::vector<Extraction> extract_descriptors(std::span<const Mesh> meshes);
}  // namespace omp

int max_threads();

}  // namespace shape3d::kernels
