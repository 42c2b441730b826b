#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "shape3d/mesh.hpp"

namespace shape3d {

double surface_area(const Mesh& mesh);

/// True when every undirected edge is shared by exactly two faces.
bool is_closed(const Mesh& mesh);

/// |signed tetrahedron sum|. Throws OpenMesh when a boundary edge exists.
double volume(const Mesh& mesh);

/// Area-weighted mean of triangle centroids. Throws ZeroArea.
Vec3 surface_centroid(const Mesh& mesh);

struct PrincipalAxes {
  std::array<Vec3, 3> axes;      // orthonormal, descending variance
  std::array<double, 3> variances;
  std::array<double, 3> extents; // vertex projection spans along each axis
  std::array<double, 3> min_proj;  // relative to the centroid
  std::array<double, 3> max_proj;
  Vec3 centroid;
};

/// Eigen-decomposition of the surface second-moment tensor about the
/// surface centroid. Throws DegenerateCovariance for collinear input.
PrincipalAxes principal_axes(const Mesh& mesh);

/// Largest pairwise distance. Zero for fewer than two points.
double diameter(std::span<const Vec3> points);

struct ConvexHull {
  std::vector<Vec3> vertices;               // sorted by input index
  std::vector<std::uint32_t> input_indices; // position of each vertex in the input
  std::vector<Triangle> faces;              // indices into `vertices`, outward CCW
  double surface_area = 0.0;
  double volume = 0.0;
  double diameter = 0.0;
  double epsilon = 0.0;                     // absolute plane tolerance used
};

/// Quickhull. Throws DegenerateHull for < 4 points or (near) coplanar input.
ConvexHull convex_hull(std::span<const Vec3> points);

struct EquivalentDiameters {
  double from_area = 0.0;  // (4/3) pi sqrt((S_ch/pi)^3)
  double from_volume = 0.0;  // (6 V_ch / pi)^(1/3)
};

EquivalentDiameters esd(const ConvexHull& hull);

enum class VolumeSource { Mesh, Hull };

/// Base measures of one model.
struct Measures {
  double volume = 0.0;
  VolumeSource volume_source = VolumeSource::Mesh;
  double surface_area = 0.0;
  Vec3 centroid = Vec3::Zero();
  std::array<Vec3, 3> principal_axes{};
  std::array<double, 3> extents{};
  std::array<double, 3> axis_min{};  // vertex projections relative to the centroid
  std::array<double, 3> axis_max{};
  double diameter = 0.0;
  std::array<double, 3> feret_extents{};
  double small_radius = 0.0;
  double large_radius = 0.0;
  double esd_area = 0.0;
  double esd_volume = 0.0;
  double hull_area = 0.0;
  double hull_volume = 0.0;
  // Best-fit plane: passes through the centroid, normal = minor principal axis.
  Vec3 plane_normal = Vec3::UnitZ();
};

}  // namespace shape3d
