#pragma once

#include <cstdint>
#include <random>

#include "shape3d/mesh.hpp"

namespace shape3d::primitives {

/// Axis-aligned box centred at the origin, each face split into n x n quads.
Mesh box(double sx, double sy, double sz, int n = 1);
Mesh unit_cube();
Mesh regular_tetrahedron(double edge = 1.0);
Mesh icosphere(int subdivisions, double radius = 1.0);
Mesh torus(int major_segments, int minor_segments, double major_radius, double minor_radius);
/// Icosphere whose 12 original icosahedron vertices are pushed out to `spike`.
Mesh spiky_star(int subdivisions, double spike = 2.0);
Mesh ellipsoid(int subdivisions, double a, double b, double c);

/// Moves each vertex by a uniform offset in [-amplitude, amplitude]^3.
Mesh perturbed(const Mesh& mesh, double amplitude, std::mt19937_64& rng);

Mat3 random_rotation(std::mt19937_64& rng);

}  // namespace shape3d::primitives
