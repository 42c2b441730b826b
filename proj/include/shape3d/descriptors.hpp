#pragma once

#include <array>
#include <span>
#include <string_view>

#include "shape3d/geometry.hpp"

namespace shape3d {

/// Dimensionless shape indexes. cv is stored as V / V_ch so that a smooth
/// convex shape scores 1 and spiky shapes approach 0.
struct ShapeIndexVector {
  double c1 = 0.0;          // esd_volume / D_ch
  double c2 = 0.0;          // 36 pi V^2 / S^3
  double s1 = 0.0;          // a V^(2/3) / S, a = 6^(2/3) pi^(1/3)
  double elongation = 0.0;  // 1 - extents[1] / extents[0]
  double radii_ratio = 0.0; // small_radius / large_radius
  double cs = 0.0;          // S_ch / S
  double cv = 0.0;          // V / V_ch

  static constexpr std::size_t kSize = 7;
  std::array<double, kSize> as_array() const {
    return {c1, c2, s1, elongation, radii_ratio, cs, cv};
  }
};

/// Category names, aligned with ShapeIndexVector::as_array().
inline constexpr std::array<std::string_view, ShapeIndexVector::kSize> kIndexCategories = {
    "compactness_esd", "compactness", "sphericity", "elongation",
    "radii_ratio",     "convexity_surface", "convexity_volume"};

/// Sphericity constant that maps a sphere to S1 = 1.
double sphericity_constant();

ShapeIndexVector shape_indexes(const Measures& measures, const ConvexHull& hull);

struct Landmarks {
  std::array<Vec3, 4> points{};               // P1 (centroid), P2, P3, P4
  std::array<std::uint32_t, 3> hull_vertex{};  // hull indices of P2, P3, P4
  double small_radius = 0.0;                   // |P1P2|
  double large_radius = 0.0;                   // |P1P3|
  std::array<double, 3> angles{};              // A2..A4 against the major axis, in [0, pi/2]
};

/// Closest / farthest hull vertex to the centroid, then farthest from P3.
/// Distances within tol::kLandmarkTie are ties and resolve to the lowest index.
Landmarks landmark_points(const ConvexHull& hull, const Vec3& centroid, const Vec3& major_axis);

/// Per anchor (P1..P4): mean, population stddev and signed cube root of the
/// third central moment of vertex distances.
using MomentVector = std::array<double, 12>;

MomentVector usr_moments(std::span<const Vec3> vertices, const Landmarks& landmarks);

struct TetraRatios {
  double volume_ratio = 0.0;  // Vol(P1P2P3P4) / V_ch
  double area_ratio = 0.0;    // Area(P2P3P4) / S_ch
};

TetraRatios tetra_ratios(const Landmarks& landmarks, const ConvexHull& hull);

struct DescriptorVector {
  Measures measures;
  ShapeIndexVector indexes;
  MomentVector moments{};
  TetraRatios tetra;
  Landmarks landmarks;
};

/// Descriptor groups used in weighted distances.
enum class DescriptorGroup : int { Measures = 0, Indexes = 1, Moments = 2 };

inline constexpr std::size_t kMeasureDims = 11;
inline constexpr std::size_t kIndexDims = ShapeIndexVector::kSize + 2;
inline constexpr std::size_t kMomentDims = 12;
inline constexpr std::size_t kDescriptorDims = kMeasureDims + kIndexDims + kMomentDims;

using FlatDescriptor = std::array<double, kDescriptorDims>;

/// Layout: [V, S, diameter, extents x3, small_r, large_r, esd_volume, S_ch, V_ch |
///          c1, c2, s1, E, R, cs, cv, volume_ratio, area_ratio | 12 moments].
FlatDescriptor flatten(const DescriptorVector& d);
DescriptorGroup group_of(std::size_t component);
std::string_view component_name(std::size_t component);

/// Full pipeline for one mesh. Errors are rethrown with the model id attached.
DescriptorVector descriptor_vector(const Mesh& mesh);

}  // namespace shape3d
