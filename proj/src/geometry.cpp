#include "shape3d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "shape3d/error.hpp"
#include "shape3d/kernels.hpp"
#include "shape3d/tolerances.hpp"

namespace shape3d {
namespace {

struct TriangleView {
  const Vec3& a;
  const Vec3& b;
  const Vec3& c;
};

TriangleView corners(const Mesh& mesh, const Triangle& t) {
  return {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 vertex_mean(std::span<const Vec3> points) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

}  // namespace

double surface_area(const Mesh& mesh) {
  double total = 0.0;
  for (const auto& t : mesh.faces) {
    const auto [a, b, c] = corners(mesh, t);
    total += triangle_area(a, b, c);
  }
  return total;
}

bool is_closed(const Mesh& mesh) {
  std::vector<std::uint64_t> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const auto& t : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      std::uint64_t u = t[i], v = t[(i + 1) % 3];
      if (u > v) std::swap(u, v);
      edges.push_back((u << 32) | v);
    }
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i != 2) return false;
    i = j;
  }
  return !edges.empty();
}

double volume(const Mesh& mesh) {
  if (!is_closed(mesh)) throw Error(ErrorCode::OpenMesh, "boundary or non-manifold edge");
  // The signed sum is origin-independent for closed meshes; a local origin
  // keeps the terms small.
  const Vec3 origin = vertex_mean(mesh.vertices);
  double sum = 0.0;
  for (const auto& t : mesh.faces) {
    const auto [a, b, c] = corners(mesh, t);
    sum += (a - origin).dot((b - origin).cross(c - origin));
  }
  return std::abs(sum) / 6.0;
}

Vec3 surface_centroid(const Mesh& mesh) {
  Vec3 weighted = Vec3::Zero();
  double total = 0.0;
  for (const auto& t : mesh.faces) {
    const auto [a, b, c] = corners(mesh, t);
    const double area = triangle_area(a, b, c);
    weighted += area * (a + b + c) / 3.0;
    total += area;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroArea, "mesh has zero surface area");
  return weighted / total;
}

namespace {

// Rotates the orthonormal pair (wide, narrow) in its plane so that `narrow`
// is the direction of minimum projected width. The minimum is attained at an
// edge normal of the projected 2D hull.
void align_to_narrowest(std::span<const Vec3> vertices, Vec3& wide, Vec3& narrow) {
  const Vec3 u = wide, v = narrow;
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(vertices.size());
  for (const auto& p : vertices) pts.emplace_back(p.dot(u), p.dot(v));
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto turn = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> ring(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(ring[k - 2], ring[k - 1], pts[i]) <= 0.0) --k;
    ring[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && turn(ring[k - 2], ring[k - 1], pts[i]) <= 0.0) --k;
    ring[k++] = pts[i];
  }
  ring.resize(k > 0 ? k - 1 : 0);
  if (ring.size() < 3) return;

  double best_width = std::numeric_limits<double>::infinity();
  Eigen::Vector2d best_dir(0.0, 1.0);
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Eigen::Vector2d edge = ring[(i + 1) % ring.size()] - ring[i];
    const double len = edge.norm();
    if (len == 0.0) continue;
    const Eigen::Vector2d normal(-edge.y() / len, edge.x() / len);
    double width = 0.0;
    for (const auto& q : ring) width = std::max(width, std::abs((q - ring[i]).dot(normal)));
    if (width < best_width) {
      best_width = width;
      best_dir = normal;
    }
  }
  narrow = (best_dir.x() * u + best_dir.y() * v).normalized();
  wide = (best_dir.y() * u - best_dir.x() * v).normalized();
}

}  // namespace

PrincipalAxes principal_axes(const Mesh& mesh) {
  PrincipalAxes out;
  out.centroid = surface_centroid(mesh);

  // Exact second moment of each triangle: A/12 (aa' + bb' + cc' + ss'), s = a+b+c.
  Mat3 moment = Mat3::Zero();
  double total = 0.0;
  for (const auto& t : mesh.faces) {
    const Vec3 a = mesh.vertices[t[0]] - out.centroid;
    const Vec3 b = mesh.vertices[t[1]] - out.centroid;
    const Vec3 c = mesh.vertices[t[2]] - out.centroid;
    const double area = triangle_area(a, b, c);
    const Vec3 s = a + b + c;
    moment += (area / 12.0) *
              (a * a.transpose() + b * b.transpose() + c * c.transpose() + s * s.transpose());
    total += area;
  }
  moment /= total;

  Eigen::SelfAdjointEigenSolver<Mat3> solver(moment);
  const auto& values = solver.eigenvalues();  // ascending
  const auto& vectors = solver.eigenvectors();
  if (!(values(2) > 0.0) || values(1) <= 1e-12 * values(2)) {
    throw Error(ErrorCode::DegenerateCovariance, "surface is collinear or a single point");
  }

  for (int i = 0; i < 3; ++i) {
    out.axes[i] = vectors.col(2 - i).normalized();
    out.variances[i] = std::max(0.0, values(2 - i));
  }
  // Equal variances leave the pair free to spin in its plane; pin it to the
  // narrowest width. A fully isotropic tensor is left as solved.
  const double top = out.variances[0];
  const bool upper = out.variances[0] - out.variances[1] <= tol::kAxisDegenerate * top;
  const bool lower = out.variances[1] - out.variances[2] <= tol::kAxisDegenerate * top;
  if (upper != lower) {
    const int wide = upper ? 0 : 1;
    align_to_narrowest(mesh.vertices, out.axes[wide], out.axes[wide + 1]);
  }
  for (auto& axis : out.axes) {
    // Sign convention: the largest-magnitude component is positive.
    Eigen::Index largest = 0;
    axis.cwiseAbs().maxCoeff(&largest);
    if (axis(largest) < 0.0) axis = -axis;
  }

  for (int i = 0; i < 3; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& v : mesh.vertices) {
      const double p = (v - out.centroid).dot(out.axes[i]);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    out.min_proj[i] = lo;
    out.max_proj[i] = hi;
    out.extents[i] = hi - lo;
  }
  return out;
}

double diameter(std::span<const Vec3> points) {
  return kernels::omp::max_pairwise_distance(points);
}

EquivalentDiameters esd(const ConvexHull& hull) {
  constexpr double pi = std::numbers::pi;
  EquivalentDiameters out;
  out.from_area = (4.0 / 3.0) * pi * std::sqrt(std::pow(hull.surface_area / pi, 3));
  out.from_volume = std::cbrt(6.0 * hull.volume / pi);
  return out;
}

// ---------------------------------------------------------------------------
// Quickhull

namespace {

struct HullFace {
  std::array<std::uint32_t, 3> v;
  Vec3 normal;
  double offset = 0.0;
  std::vector<std::uint32_t> outside;
  bool alive = true;

  double distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

class QuickHull {
 public:
  QuickHull(std::span<const Vec3> points, double eps) : points_(points), eps_(eps) {}

  std::vector<HullFace> run(const std::array<std::uint32_t, 4>& simplex) {
    build_simplex(simplex);
    std::vector<std::uint32_t> candidates;
    candidates.reserve(points_.size());
    for (std::uint32_t i = 0; i < points_.size(); ++i) {
      if (std::find(simplex.begin(), simplex.end(), i) == simplex.end()) candidates.push_back(i);
    }
    assign(candidates, {0, 1, 2, 3});

    std::vector<std::size_t> work = {0, 1, 2, 3};
    while (!work.empty()) {
      const std::size_t f = work.back();
      work.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      expand(f, work);
    }

    std::vector<HullFace> alive;
    for (auto& f : faces_) {
      if (f.alive) alive.push_back(std::move(f));
    }
    return alive;
  }

 private:
  std::size_t add_face(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    HullFace face;
    face.v = {a, b, c};
    const Vec3 n = (points_[b] - points_[a]).cross(points_[c] - points_[a]);
    const double len = n.norm();
    face.normal = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    face.offset = face.normal.dot(points_[a]);
    const std::size_t id = faces_.size();
    faces_.push_back(std::move(face));
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
    return id;
  }

  void build_simplex(const std::array<std::uint32_t, 4>& s) {
    const Vec3 inside = (points_[s[0]] + points_[s[1]] + points_[s[2]] + points_[s[3]]) / 4.0;
    const std::array<std::array<std::uint32_t, 3>, 4> tris = {{{s[0], s[1], s[2]},
                                                               {s[0], s[3], s[1]},
                                                               {s[1], s[3], s[2]},
                                                               {s[2], s[3], s[0]}}};
    // Flip the whole tetrahedron if the first face points inward.
    const Vec3 n = (points_[s[1]] - points_[s[0]]).cross(points_[s[2]] - points_[s[0]]);
    const bool flip = n.dot(inside - points_[s[0]]) > 0.0;
    for (const auto& t : tris) {
      if (flip) {
        add_face(t[0], t[2], t[1]);
      } else {
        add_face(t[0], t[1], t[2]);
      }
    }
  }

  void assign(const std::vector<std::uint32_t>& candidates, const std::vector<std::size_t>& targets) {
    for (const std::uint32_t p : candidates) {
      double best = eps_;
      std::size_t best_face = faces_.size();
      for (const std::size_t f : targets) {
        const double d = faces_[f].distance(points_[p]);
        if (d > best) {
          best = d;
          best_face = f;
        }
      }
      if (best_face != faces_.size()) faces_[best_face].outside.push_back(p);
    }
  }

  void expand(std::size_t start, std::vector<std::size_t>& work) {
    const auto& outside = faces_[start].outside;
    std::uint32_t eye = outside.front();
    double far = faces_[start].distance(points_[eye]);
    for (const std::uint32_t p : outside) {
      const double d = faces_[start].distance(points_[p]);
      if (d > far) {
        far = d;
        eye = p;
      }
    }
    const Vec3& eye_point = points_[eye];

    // Flood the visible region and record its boundary (horizon) edges.
    std::vector<std::size_t> visible = {start};
    std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon;
    std::vector<char> state(faces_.size(), 0);  // 1 visible, 2 not visible
    state[start] = 1;
    for (std::size_t i = 0; i < visible.size(); ++i) {
      const std::size_t f = visible[i];
      for (int e = 0; e < 3; ++e) {
        const std::uint32_t a = faces_[f].v[e];
        const std::uint32_t b = faces_[f].v[(e + 1) % 3];
        const auto it = edges_.find(edge_key(b, a));
        if (it == edges_.end()) continue;
        const std::size_t g = it->second;
        if (state[g] == 0) {
          state[g] = faces_[g].distance(eye_point) > eps_ ? 1 : 2;
          if (state[g] == 1) visible.push_back(g);
        }
        if (state[g] == 2) horizon.emplace_back(a, b);
      }
    }

    std::vector<std::uint32_t> orphans;
    for (const std::size_t f : visible) {
      auto& face = faces_[f];
      face.alive = false;
      for (const std::uint32_t p : face.outside) {
        if (p != eye) orphans.push_back(p);
      }
      face.outside.clear();
      face.outside.shrink_to_fit();
      for (int e = 0; e < 3; ++e) {
        const auto it = edges_.find(edge_key(face.v[e], face.v[(e + 1) % 3]));
        if (it != edges_.end() && it->second == f) edges_.erase(it);
      }
    }

    std::vector<std::size_t> created;
    created.reserve(horizon.size());
    for (const auto& [a, b] : horizon) created.push_back(add_face(a, b, eye));
    assign(orphans, created);
    for (const std::size_t f : created) {
      if (!faces_[f].outside.empty()) work.push_back(f);
    }
  }

  std::span<const Vec3> points_;
  double eps_;
  std::vector<HullFace> faces_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
};

}  // namespace

ConvexHull convex_hull(std::span<const Vec3> points) {
  if (points.size() < 4) throw Error(ErrorCode::DegenerateHull, "fewer than 4 points");

  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = (hi - lo).norm();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::DegenerateHull, "all points coincide");
  }
  const double eps = tol::kHullRelative * scale;

  // Initial simplex from the extreme points.
  std::array<std::uint32_t, 6> extremes{};
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      if (points[i](axis) < points[extremes[2 * axis]](axis)) extremes[2 * axis] = i;
      if (points[i](axis) > points[extremes[2 * axis + 1]](axis)) extremes[2 * axis + 1] = i;
    }
  }
  std::uint32_t i0 = extremes[0], i1 = extremes[1];
  double best = -1.0;
  for (std::size_t a = 0; a < extremes.size(); ++a) {
    for (std::size_t b = a + 1; b < extremes.size(); ++b) {
      const double d = (points[extremes[a]] - points[extremes[b]]).squaredNorm();
      if (d > best) {
        best = d;
        i0 = extremes[a];
        i1 = extremes[b];
      }
    }
  }

  const Vec3 dir = (points[i1] - points[i0]).normalized();
  std::uint32_t i2 = i0;
  best = -1.0;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    const Vec3 r = points[i] - points[i0];
    const double d = (r - r.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (best <= eps) throw Error(ErrorCode::DegenerateHull, "points are collinear");

  const Vec3 normal = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  std::uint32_t i3 = i0;
  best = -1.0;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    const double d = std::abs(normal.dot(points[i] - points[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (best <= eps) throw Error(ErrorCode::DegenerateHull, "points are coplanar");

  QuickHull qh(points, eps);
  const auto faces = qh.run({i0, i1, i2, i3});

  ConvexHull hull;
  hull.epsilon = eps;
  std::vector<std::uint32_t> used;
  for (const auto& f : faces) used.insert(used.end(), f.v.begin(), f.v.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  for (std::uint32_t i = 0; i < used.size(); ++i) {
    remap[used[i]] = i;
    hull.vertices.push_back(points[used[i]]);
  }
  hull.input_indices = used;
  for (const auto& f : faces) hull.faces.push_back({remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]});

  const Vec3 inside = vertex_mean(hull.vertices);
  for (const auto& f : hull.faces) {
    const Vec3& a = hull.vertices[f[0]];
    const Vec3& b = hull.vertices[f[1]];
    const Vec3& c = hull.vertices[f[2]];
    hull.surface_area += triangle_area(a, b, c);
    hull.volume += (a - inside).dot((b - inside).cross(c - inside)) / 6.0;
  }
  hull.diameter = diameter(hull.vertices);
  return hull;
}

}  // namespace shape3d
