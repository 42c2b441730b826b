#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace shape3d {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh. Polygonal input is fan-triangulated on load.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> faces;
  std::string source_id;
};

/// Parses ASCII OFF. The "OFF" keyword line is optional; '#' comments and
/// blank lines are skipped. A face "k i1 ... ik" becomes k-2 triangles
/// pivoted at i1.
Mesh parse_off(std::string_view text, std::string source_id = {});
Mesh read_off_file(const std::string& path);

/// Writes triangulated geometry with 17 significant digits so that
/// parse_off(serialize_off(m)) reproduces the coordinates bit for bit.
std::string serialize_off(const Mesh& mesh);

/// Applies v -> R v + t. Throws NonOrthonormalRotation if R is not a rotation
/// (or reflection) within tol::kOrthonormal.
Mesh rigid_transform(const Mesh& mesh, const Mat3& rotation, const Vec3& translation);

Mesh scaled(const Mesh& mesh, double factor);

}  // namespace shape3d
