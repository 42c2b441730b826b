#include "support.hpp"

#include "shape3d/primitives.hpp"

namespace test_support {

shape3d::Mesh irregular_blob(std::mt19937_64& rng, int subdivisions) {
  auto mesh = shape3d::primitives::icosphere(subdivisions);
  for (auto& v : mesh.vertices) {
    v *= 0.7 + 0.6 * uniform01(rng);
    v.x() *= 1.8;
    v.y() *= 1.2;
  }
  mesh.source_id = "blob";
  return mesh;
}

}  // namespace test_support
