#include "shape3d/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shape3d/error.hpp"
#include "shape3d/tolerances.hpp"

namespace shape3d {
namespace {

double require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::DegenerateMeasure, std::string(what) + " must be positive");
  }
  return value;
}

double unit_clamp(double value) { return std::min(value, 1.0); }

}  // namespace

double sphericity_constant() { return std::cbrt(36.0 * std::numbers::pi); }

ShapeIndexVector shape_indexes(const Measures& m, const ConvexHull& hull) {
  constexpr double pi = std::numbers::pi;
  const double area = require_positive(m.surface_area, "surface area");
  const double vol = require_positive(m.volume, "volume");
  const double hull_diameter = require_positive(hull.diameter, "hull diameter");
  const double hull_volume = require_positive(hull.volume, "hull volume");
  const double length = require_positive(m.extents[0], "major extent");
  const double large = require_positive(m.large_radius, "large radius");

  ShapeIndexVector out;
  out.c1 = unit_clamp(m.esd_volume / hull_diameter);
  out.c2 = unit_clamp(36.0 * pi * vol * vol / (area * area * area));
  out.s1 = unit_clamp(sphericity_constant() * std::cbrt(vol * vol) / area);
  out.elongation = std::clamp(1.0 - m.extents[1] / length, 0.0, 1.0);
  out.radii_ratio = m.small_radius / large;
  out.cs = unit_clamp(hull.surface_area / area);
  out.cv = unit_clamp(vol / hull_volume);
  return out;
}

Landmarks landmark_points(const ConvexHull& hull, const Vec3& centroid, const Vec3& major_axis) {
  if (hull.vertices.size() < 4) throw Error(ErrorCode::DegenerateHull, "hull has < 4 vertices");
  constexpr double tie = tol::kLandmarkTie;
  const auto& v = hull.vertices;

  Landmarks out;
  std::uint32_t nearest = 0, farthest = 0;
  double near_d = (v[0] - centroid).norm();
  double far_d = near_d;
  for (std::uint32_t i = 1; i < v.size(); ++i) {
    const double d = (v[i] - centroid).norm();
    if (d < near_d * (1.0 - tie)) {
      near_d = d;
      nearest = i;
    }
    if (d > far_d * (1.0 + tie)) {
      far_d = d;
      farthest = i;
    }
  }
  std::uint32_t opposite = 0;
  double opp_d = (v[0] - v[farthest]).norm();
  for (std::uint32_t i = 1; i < v.size(); ++i) {
    const double d = (v[i] - v[farthest]).norm();
    if (d > opp_d * (1.0 + tie)) {
      opp_d = d;
      opposite = i;
    }
  }

  out.points = {centroid, v[nearest], v[farthest], v[opposite]};
  out.hull_vertex = {nearest, farthest, opposite};
  out.small_radius = near_d;
  out.large_radius = far_d;
  const Vec3 axis = major_axis.normalized();
  for (int i = 0; i < 3; ++i) {
    const Vec3 r = out.points[i + 1] - centroid;
    const double len = r.norm();
    out.angles[i] = len > 0.0 ? std::acos(std::clamp(std::abs(r.dot(axis)) / len, 0.0, 1.0)) : 0.0;
  }
  return out;
}

MomentVector usr_moments(std::span<const Vec3> vertices, const Landmarks& landmarks) {
  MomentVector out{};
  const double n = static_cast<double>(vertices.size());
  if (vertices.empty()) return out;
  std::vector<double> dist(vertices.size());
  for (std::size_t a = 0; a < 4; ++a) {
    const Vec3& anchor = landmarks.points[a];
    double sum = 0.0;
    for (std::size_t j = 0; j < vertices.size(); ++j) {
      dist[j] = (vertices[j] - anchor).norm();
      sum += dist[j];
    }
    const double mean = sum / n;
    double m2 = 0.0, m3 = 0.0;
    for (const double d : dist) {
      const double c = d - mean;
      m2 += c * c;
      m3 += c * c * c;
    }
    out[3 * a] = mean;
    out[3 * a + 1] = std::sqrt(m2 / n);
    out[3 * a + 2] = std::cbrt(m3 / n);
  }
  return out;
}

TetraRatios tetra_ratios(const Landmarks& l, const ConvexHull& hull) {
  const auto& [p1, p2, p3, p4] = l.points;
  const double tet = std::abs((p2 - p1).dot((p3 - p1).cross(p4 - p1))) / 6.0;
  const double tri = 0.5 * (p3 - p2).cross(p4 - p2).norm();
  TetraRatios out;
  if (hull.volume > 0.0) out.volume_ratio = std::clamp(tet / hull.volume, 0.0, 1.0);
  if (hull.surface_area > 0.0) out.area_ratio = std::clamp(tri / hull.surface_area, 0.0, 1.0);
  return out;
}

FlatDescriptor flatten(const DescriptorVector& d) {
  const auto& m = d.measures;
  const auto& x = d.indexes;
  FlatDescriptor f{};
  std::size_t i = 0;
  for (const double v : {m.volume, m.surface_area, m.diameter, m.extents[0], m.extents[1],
                         m.extents[2], m.small_radius, m.large_radius, m.esd_volume, m.hull_area,
                         m.hull_volume}) {
    f[i++] = v;
  }
  for (const double v : x.as_array()) f[i++] = v;
  f[i++] = d.tetra.volume_ratio;
  f[i++] = d.tetra.area_ratio;
  for (const double v : d.moments) f[i++] = v;
  return f;
}

DescriptorGroup group_of(std::size_t component) {
  if (component < kMeasureDims) return DescriptorGroup::Measures;
  if (component < kMeasureDims + kIndexDims) return DescriptorGroup::Indexes;
  return DescriptorGroup::Moments;
}

std::string_view component_name(std::size_t component) {
  static constexpr std::array<std::string_view, kDescriptorDims> names = {
      "volume", "surface_area", "diameter", "extent_major", "extent_middle", "extent_minor",
      "small_radius", "large_radius", "esd_volume", "hull_area", "hull_volume",
      "c1", "c2", "s1", "elongation", "radii_ratio", "cs", "cv", "volume_ratio", "area_ratio",
      "p1_mean", "p1_stddev", "p1_skew", "p2_mean", "p2_stddev", "p2_skew",
      "p3_mean", "p3_stddev", "p3_skew", "p4_mean", "p4_stddev", "p4_skew"};
  return names.at(component);
}

DescriptorVector descriptor_vector(const Mesh& mesh) {
  try {
    if (mesh.vertices.size() < 4) {
      throw Error(ErrorCode::DegenerateHull, "mesh has fewer than 4 vertices");
    }
    DescriptorVector d;
    Measures& m = d.measures;
    m.surface_area = surface_area(mesh);
    const PrincipalAxes axes = principal_axes(mesh);
    m.centroid = axes.centroid;
    m.principal_axes = axes.axes;
    m.extents = axes.extents;
    m.axis_min = axes.min_proj;
    m.axis_max = axes.max_proj;
    m.feret_extents = axes.extents;
    m.plane_normal = axes.axes[2];

    const ConvexHull hull = convex_hull(mesh.vertices);
    m.hull_area = hull.surface_area;
    m.hull_volume = hull.volume;
    m.diameter = hull.diameter;
    if (is_closed(mesh)) {
      m.volume = volume(mesh);
    } else {
      m.volume = hull.volume;
      m.volume_source = VolumeSource::Hull;
    }
    const auto eq = esd(hull);
    m.esd_area = eq.from_area;
    m.esd_volume = eq.from_volume;

    d.landmarks = landmark_points(hull, m.centroid, m.principal_axes[0]);
    m.small_radius = d.landmarks.small_radius;
    m.large_radius = d.landmarks.large_radius;

    d.indexes = shape_indexes(m, hull);
    d.moments = usr_moments(mesh.vertices, d.landmarks);
    d.tetra = tetra_ratios(d.landmarks, hull);
    return d;
  } catch (const Error& e) {
    if (mesh.source_id.empty()) throw;
    throw Error(e.code(), mesh.source_id + ": " + e.detail());
  }
}

}  // namespace shape3d
