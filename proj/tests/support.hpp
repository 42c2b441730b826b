#pragma once

#include <cmath>
#include <random>


#include "shape3d/mesh.hpp"

namespace test_support {

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Random closed, star-shaped mesh: an icosphere with radially jittered vertices.
shape3d::Mesh irregular_blob(std::mt19937_64& rng, int subdivisions = 2);

}  // namespace test_support
