#pragma once

#include <compare>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shape3d/descriptors.hpp"
#include "shape3d/semantics.hpp"
#include "shape3d/tolerances.hpp"

namespace shape3d {

struct Fact {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const Fact&) const = default;
};

namespace relation {
inline constexpr std::string_view kOverlap = "Overlap";
inline constexpr std::string_view kAdjacent = "Adjacent";
inline constexpr std::string_view kOn = "On";
inline constexpr std::string_view kCross = "Cross";
inline constexpr std::string_view kNotCross = "NotCross";
inline constexpr std::string_view kContained = "Contained";
inline constexpr std::string_view kVolumeRatio = "volume_ratio";
inline constexpr std::string_view kAreaRatio = "area_ratio";
}  // namespace relation

/// Overlap, Adjacent, Cross and NotCross are stored in both directions.
bool is_symmetric(std::string_view predicate);
bool is_registered_predicate(std::string_view predicate);

struct Segment {
  Vec3 a;
  Vec3 b;
};

struct Plane {
  Vec3 point;
  Vec3 normal;  // unit length
};

/// Named geometric entities of one model, in the model's own frame.
/// Lines: axis1..axis3 (principal axes spanning the bounding box through the
/// centroid) and r13 (P1P3). Planes: "plan" (best fit) and "tri" (P2P3P4,
/// omitted when degenerate).
struct SpatialEntities {
  std::array<Vec3, 4> points{};
  std::vector<std::pair<std::string, Segment>> lines;
  std::vector<std::pair<std::string, Plane>> planes;
  double scale = 0.0;
};

SpatialEntities spatial_entities(const Landmarks& landmarks, const Measures& measures);

/// Qualitative facts between entities using tau = epsilon_rel * scale.
/// Entity names are model-local ("P1", "axis2", ...).
std::vector<Fact> qualitative_relations(const SpatialEntities& entities,
                                        double epsilon_rel = tol::kRelationEpsilon);

/// "q0".."q9" decile token for a ratio in [0, 1].
std::string ratio_bucket(double ratio);

double point_segment_distance(const Vec3& p, const Segment& s);
double segment_segment_distance(const Segment& s, const Segment& t);

class FactStore {
 public:
  /// Adds a fact (and its mirror for symmetric predicates). Returns false on duplicates.
  bool add(Fact fact);

  /// Concept, relation and ratio facts for one model. Local entity names in
  /// `relations` are prefixed with "<model_id>/".
  void assert_model(const std::string& model_id, const SemanticLabel& label,
                    std::span<const Fact> relations, const TetraRatios& ratios);

  /// Registers a model id without facts (used when reloading a store).
  void add_model(const std::string& model_id);

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  const std::vector<Fact>& facts() const { return facts_; }
  const std::set<std::string>& models() const { return models_; }
  bool has_model(std::string_view id) const { return models_.count(std::string(id)) > 0; }

  /// Indexes of facts whose non-empty fields equal the given constants.
  std::vector<std::size_t> lookup(std::string_view subject, std::string_view predicate,
                                  std::string_view object) const;

  /// One fact per line, "subject predicate object", sorted.
  std::string export_text() const;

 private:
  bool insert(Fact fact);

  std::vector<Fact> facts_;
  std::set<Fact> unique_;
  std::set<std::string> models_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_subject_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_predicate_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_object_;
  bool frozen_ = false;
};

/// Pattern terms: a constant, a variable "?x", or a variable with a literal
/// suffix "?x/P2" (matches "<value>/P2" and binds x to <value>).
struct Pattern {
  std::string subject;
  std::string predicate;
  std::string object;
};

Pattern parse_pattern(std::string_view text);  // "s p o"

/// Model IDs (values of ?<model_var>) satisfying every pattern. An empty
/// pattern list returns every asserted model.
std::set<std::string> query(const FactStore& store, std::span<const Pattern> patterns,
                            std::string_view model_var = "m");

}  // namespace shape3d
