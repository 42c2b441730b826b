#pragma once

// Numeric tolerances shared by every module. Keep them here so tests and
// library code agree on a single set of values.

namespace shape3d::tol {

// Coplanarity slack for the hull, relative to the input bounding-sphere diameter.
inline constexpr double kHullRelative = 1e-9;

// Relative slack used when comparing landmark distances for ties.
inline constexpr double kLandmarkTie = 1e-9;

// Principal variances closer than this (relative to the largest) count as equal.
inline constexpr double kAxisDegenerate = 1e-9;

// Rotation matrices must satisfy |R^T R - I| below this.
inline constexpr double kOrthonormal = 1e-12;


// A normalisation component is constant when stddev <= kConstantRelative * max(1, |mean|).
inline constexpr double kConstantRelative = 1e-12;

// Default relative threshold for qualitative spatial relations.
inline constexpr double kRelationEpsilon = 0.05;

// Rigid-motion invariance checks.
inline constexpr double kRigidInvariance = 1e-6;
inline constexpr double kScaling = 1e-9;

}  // namespace shape3d::tol
