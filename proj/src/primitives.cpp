#include "shape3d/primitives.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Geometry>

namespace shape3d::primitives {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Flips triangles of a star-shaped mesh so normals point away from `center`.
void orient_outward(Mesh& mesh, const Vec3& center) {
  for (auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const Vec3 n = (b - a).cross(c - a);
    if (n.dot((a + b + c) / 3.0 - center) < 0.0) std::swap(f[1], f[2]);
  }
}

}  // namespace

Mesh box(double sx, double sy, double sz, int n) {
  Mesh mesh;
  mesh.source_id = "box";
  std::map<std::array<int, 3>, std::uint32_t> ids;
  const std::array<double, 3> size = {sx, sy, sz};
  auto vertex = [&](std::array<int, 3> g) {
    const auto [it, inserted] = ids.emplace(g, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) {
      Vec3 p;
      for (int d = 0; d < 3; ++d) p(d) = (static_cast<double>(g[d]) / n - 0.5) * size[d];
      mesh.vertices.push_back(p);
    }
    return it->second;
  };
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (const int side : {0, n}) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          std::array<std::array<int, 3>, 4> quad{};
          const std::array<std::pair<int, int>, 4> uv = {{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
          for (int q = 0; q < 4; ++q) {
            quad[q][axis] = side;
            quad[q][u] = uv[q].first;
            quad[q][v] = uv[q].second;
          }
          const auto a = vertex(quad[0]), b = vertex(quad[1]), c = vertex(quad[2]), d = vertex(quad[3]);
          if (side == n) {
            mesh.faces.push_back({a, b, c});
            mesh.faces.push_back({a, c, d});
          } else {
            mesh.faces.push_back({a, c, b});
            mesh.faces.push_back({a, d, c});
          }
        }
      }
    }
  }
  return mesh;
}

Mesh unit_cube() {
  Mesh m = box(1.0, 1.0, 1.0, 1);
  m.source_id = "unit_cube";
  return m;
}

Mesh regular_tetrahedron(double edge) {
  Mesh mesh;
  mesh.source_id = "tetrahedron";
  const double s = edge / (2.0 * std::numbers::sqrt2);
  mesh.vertices = {Vec3(1, 1, 1) * s, Vec3(1, -1, -1) * s, Vec3(-1, 1, -1) * s, Vec3(-1, -1, 1) * s};
  mesh.faces = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  orient_outward(mesh, Vec3::Zero());
  return mesh;
}

Mesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh mesh;
  mesh.source_id = "icosphere";
  mesh.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : mesh.vertices) v.normalize();
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      const auto [it, inserted] = midpoints.emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
      if (inserted) mesh.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]).normalized());
      return it->second;
    };
    std::vector<Triangle> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      const auto ab = midpoint(f[0], f[1]);
      const auto bc = midpoint(f[1], f[2]);
      const auto ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }
  for (auto& v : mesh.vertices) v *= radius;
  orient_outward(mesh, Vec3::Zero());
  return mesh;
}

Mesh torus(int major_segments, int minor_segments, double major_radius, double minor_radius) {
  Mesh mesh;
  mesh.source_id = "torus";
  const double tau = 2.0 * std::numbers::pi;
  for (int i = 0; i < major_segments; ++i) {
    const double theta = tau * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double phi = tau * j / minor_segments;
      const double ring = major_radius + minor_radius * std::cos(phi);
      mesh.vertices.emplace_back(ring * std::cos(theta), ring * std::sin(theta),
                                 minor_radius * std::sin(phi));
    }
  }
  auto id = [&](int i, int j) {
    return static_cast<std::uint32_t>((i % major_segments) * minor_segments + (j % minor_segments));
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }
  // Orient against the tube centre line.
  for (auto& f : mesh.faces) {
    const Vec3 a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
    const Vec3 centre = (a + b + c) / 3.0;
    Vec3 axis_point(centre.x(), centre.y(), 0.0);
    axis_point = axis_point.normalized() * major_radius;
    if ((b - a).cross(c - a).dot(centre - axis_point) < 0.0) std::swap(f[1], f[2]);
  }
  return mesh;
}

Mesh spiky_star(int subdivisions, double spike) {
  Mesh mesh = icosphere(subdivisions);
  for (std::size_t i = 0; i < 12; ++i) mesh.vertices[i] *= spike;
  mesh.source_id = "star";
  return mesh;
}

Mesh ellipsoid(int subdivisions, double a, double b, double c) {
  Mesh mesh = icosphere(subdivisions);
  for (auto& v : mesh.vertices) v = Vec3(v.x() * a, v.y() * b, v.z() * c);
  mesh.source_id = "ellipsoid";
  return mesh;
}

Mesh perturbed(const Mesh& mesh, double amplitude, std::mt19937_64& rng) {
  Mesh out = mesh;
  for (auto& v : out.vertices) {
    for (int d = 0; d < 3; ++d) v(d) += (2.0 * uniform01(rng) - 1.0) * amplitude;
  }
  return out;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  // Uniform unit quaternion (Shoemake).
  const double u1 = uniform01(rng), u2 = uniform01(rng), u3 = uniform01(rng);
  const double tau = 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  Eigen::Quaterniond q(a * std::sin(tau * u2), a * std::cos(tau * u2), b * std::sin(tau * u3),
                       b * std::cos(tau * u3));
  return q.normalized().toRotationMatrix();
}

}  // namespace shape3d::primitives
