#include "shape3d/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shape3d/error.hpp"
#include "shape3d/tolerances.hpp"

namespace shape3d {
namespace {

std::string_view trim(std::string_view s) {
  const auto hash = s.find('#');
  if (hash != std::string_view::npos) s = s.substr(0, hash);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits the input into non-empty, comment-free lines.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      line = trim(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
      if (!line.empty()) return true;
    }
    return false;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (first != last && *first == '+') ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

Mesh parse_off(std::string_view text, std::string source_id) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw Error(ErrorCode::MalformedHeader, "no counts line");

  auto counts = tokens(line);
  if (!counts.empty() && counts.front() == "OFF") {
    counts.erase(counts.begin());
    if (counts.empty()) {
      if (!reader.next(line)) throw Error(ErrorCode::MalformedHeader, "no counts line");
      counts = tokens(line);
    }
  }
  long long nv = 0, nf = 0;
  if (counts.size() < 2 || !parse_number(counts[0], nv) || !parse_number(counts[1], nf) ||
      nv < 0 || nf < 0) {
    throw Error(ErrorCode::MalformedHeader, "unreadable counts line '" + std::string(line) + "'");
  }
  if (nv == 0 || nf == 0) throw Error(ErrorCode::EmptyMesh, "no vertices or faces");

  Mesh mesh;
  mesh.source_id = std::move(source_id);
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (!reader.next(line)) throw Error(ErrorCode::TruncatedFile, "missing vertex lines");
    const auto t = tokens(line);
    Vec3 v;
    if (t.size() < 3 || !parse_number(t[0], v.x()) || !parse_number(t[1], v.y()) ||
        !parse_number(t[2], v.z())) {
      throw Error(ErrorCode::TruncatedFile, "bad vertex line '" + std::string(line) + "'");
    }
    mesh.vertices.push_back(v);
  }

  mesh.faces.reserve(static_cast<std::size_t>(nf));
  std::vector<std::uint32_t> polygon;
  for (long long f = 0; f < nf; ++f) {
    if (!reader.next(line)) throw Error(ErrorCode::TruncatedFile, "missing face lines");
    const auto t = tokens(line);
    long long k = 0;
    if (t.empty() || !parse_number(t[0], k) || k < 0 ||
        static_cast<long long>(t.size()) < k + 1) {
      throw Error(ErrorCode::TruncatedFile, "bad face line '" + std::string(line) + "'");
    }
    polygon.clear();
    for (long long j = 1; j <= k; ++j) {
      long long idx = 0;
      if (!parse_number(t[j], idx)) {
        throw Error(ErrorCode::TruncatedFile, "bad face index '" + std::string(t[j]) + "'");
      }
      if (idx < 0 || idx >= nv) {
        throw Error(ErrorCode::IndexOutOfRange, "face index " + std::to_string(idx) +
                                                     " with " + std::to_string(nv) + " vertices");
      }
      polygon.push_back(static_cast<std::uint32_t>(idx));
    }
    for (std::size_t j = 1; j + 1 < polygon.size(); ++j) {
      mesh.faces.push_back({polygon[0], polygon[j], polygon[j + 1]});
    }
  }
  if (mesh.faces.empty()) throw Error(ErrorCode::EmptyMesh, "no triangles after triangulation");
  return mesh;
}

Mesh read_off_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::TruncatedFile, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_off(buffer.str(), path);
}

std::string serialize_off(const Mesh& mesh) {
  std::string out = "OFF\n";
  out += std::to_string(mesh.vertices.size()) + " " + std::to_string(mesh.faces.size()) + " 0\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out += buf;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(buf, sizeof(buf), "3 %u %u %u\n", f[0], f[1], f[2]);
    out += buf;
  }
  return out;
}

Mesh rigid_transform(const Mesh& mesh, const Mat3& rotation, const Vec3& translation) {
  const Mat3 gram = rotation.transpose() * rotation - Mat3::Identity();
  if (!(gram.cwiseAbs().maxCoeff() <= tol::kOrthonormal)) {
    throw Error(ErrorCode::NonOrthonormalRotation, "rotation is not orthonormal");
  }
  Mesh out = mesh;
  for (auto& v : out.vertices) v = rotation * v + translation;
  return out;
}

Mesh scaled(const Mesh& mesh, double factor) {
  Mesh out = mesh;
  for (auto& v : out.vertices) v *= factor;
  return out;
}

}  // namespace shape3d
