#include "shape3d/ontology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>

#include "shape3d/error.hpp"

namespace shape3d {

bool is_symmetric(std::string_view p) {
  return p == relation::kOverlap || p == relation::kAdjacent || p == relation::kCross ||
         p == relation::kNotCross;
}

bool is_registered_predicate(std::string_view p) {
  static constexpr std::array<std::string_view, 8> fixed = {
      relation::kOverlap, relation::kAdjacent, relation::kOn,         relation::kCross,
      relation::kNotCross, relation::kContained, relation::kVolumeRatio, relation::kAreaRatio};
  return std::find(fixed.begin(), fixed.end(), p) != fixed.end() ||
         std::find(kIndexCategories.begin(), kIndexCategories.end(), p) != kIndexCategories.end();
}

// ---------------------------------------------------------------------------
// Geometry helpers

double point_segment_distance(const Vec3& p, const Segment& s) {
  const Vec3 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (s.a + t * d)).norm();
}

double segment_segment_distance(const Segment& s1, const Segment& s2) {
  // Closest points of two segments (Ericson, Real-Time Collision Detection 5.1.9).
  const Vec3 d1 = s1.b - s1.a;
  const Vec3 d2 = s2.b - s2.a;
  const Vec3 r = s1.a - s2.a;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.norm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((s1.a + s * d1) - (s2.a + t * d2)).norm();
}

SpatialEntities spatial_entities(const Landmarks& landmarks, const Measures& measures) {
  static constexpr std::array<const char*, 3> axis_names = {"axis1", "axis2", "axis3"};
  SpatialEntities out;
  out.points = landmarks.points;
  const Vec3& c = measures.centroid;
  const double reference = std::max(measures.extents[0], measures.esd_volume);
  for (int i = 0; i < 3; ++i) {
    if (!(measures.extents[i] > 1e-9 * reference)) {
      throw Error(ErrorCode::DegenerateEntity, std::string(axis_names[i]) + " has zero length");
    }
    const Vec3& axis = measures.principal_axes[i];
    out.lines.emplace_back(axis_names[i], Segment{c + measures.axis_min[i] * axis,
                                                  c + measures.axis_max[i] * axis});
  }
  out.scale = measures.esd_volume;
  if (!(out.scale > 0.0)) throw Error(ErrorCode::DegenerateEntity, "zero model scale");
  out.lines.emplace_back("r13", Segment{landmarks.points[0], landmarks.points[2]});

  out.planes.emplace_back("plan", Plane{c, measures.plane_normal.normalized()});
  const auto& p = landmarks.points;
  const Vec3 n = (p[2] - p[1]).cross(p[3] - p[1]);
  if (n.norm() > 1e-12 * out.scale * out.scale) {
    out.planes.emplace_back("tri", Plane{p[1], n.normalized()});
  }
  return out;
}

std::vector<Fact> qualitative_relations(const SpatialEntities& entities, double epsilon_rel) {
  if (!(epsilon_rel > 0.0 && epsilon_rel < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon_rel must lie in (0, 0.5)");
  }
  const double tau = epsilon_rel * entities.scale;
  static constexpr std::array<const char*, 4> point_names = {"P1", "P2", "P3", "P4"};
  std::vector<Fact> facts;
  auto emit = [&](std::string s, std::string_view p, std::string o) {
    facts.push_back({std::move(s), std::string(p), std::move(o)});
  };

  const auto& pts = entities.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).norm();
      if (d < tau) {
        emit(point_names[i], relation::kOverlap, point_names[j]);
      } else if (d < 2.0 * tau) {
        emit(point_names[i], relation::kAdjacent, point_names[j]);
      }
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (const auto& [name, seg] : entities.lines) {
      const double d = point_segment_distance(pts[i], seg);
      if (d < tau) {
        emit(point_names[i], relation::kOn, name);
      } else if (d < 2.0 * tau) {
        emit(point_names[i], relation::kAdjacent, name);
      }
    }
  }
  const auto& lines = entities.lines;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double d = segment_segment_distance(lines[i].second, lines[j].second);
      emit(lines[i].first, d < tau ? relation::kCross : relation::kNotCross, lines[j].first);
    }
  }
  for (const auto& [lname, seg] : lines) {
    for (const auto& [pname, plane] : entities.planes) {
      const double da = plane.normal.dot(seg.a - plane.point);
      const double db = plane.normal.dot(seg.b - plane.point);
      if (std::abs(da) < tau && std::abs(db) < tau) {
        emit(lname, relation::kContained, pname);
        continue;
      }
      const double nearest = da * db <= 0.0 ? 0.0 : std::min(std::abs(da), std::abs(db));
      if (nearest < 2.0 * tau) emit(lname, relation::kAdjacent, pname);
    }
  }
  return facts;
}

std::string ratio_bucket(double ratio) {
  const int q = std::clamp(static_cast<int>(std::floor(ratio * 10.0)), 0, 9);
  return "q" + std::to_string(q);
}

// ---------------------------------------------------------------------------
// FactStore

bool FactStore::add(Fact fact) {
  if (frozen_) throw Error(ErrorCode::StoreFrozen, "fact store is frozen");
  if (!is_registered_predicate(fact.predicate)) {
    throw Error(ErrorCode::UnknownPredicate, fact.predicate);
  }
  if (is_symmetric(fact.predicate) && fact.subject != fact.object) {
    insert(Fact{fact.object, fact.predicate, fact.subject});
  }
  return insert(std::move(fact));
}

bool FactStore::insert(Fact fact) {
  if (!unique_.insert(fact).second) return false;
  const std::size_t id = facts_.size();
  by_subject_[fact.subject].push_back(id);
  by_predicate_[fact.predicate].push_back(id);
  by_object_[fact.object].push_back(id);
  facts_.push_back(std::move(fact));
  return true;
}

void FactStore::assert_model(const std::string& model_id, const SemanticLabel& label,
                             std::span<const Fact> relations, const TetraRatios& ratios) {
  if (frozen_) throw Error(ErrorCode::StoreFrozen, "fact store is frozen");
  if (models_.count(model_id)) throw Error(ErrorCode::DuplicateModel, model_id);
  models_.insert(model_id);
  for (const auto& [category, id] : label) add({model_id, category, std::to_string(id)});
  const std::string prefix = model_id + "/";
  for (const auto& f : relations) add({prefix + f.subject, f.predicate, prefix + f.object});
  add({model_id, std::string(relation::kVolumeRatio), ratio_bucket(ratios.volume_ratio)});
  add({model_id, std::string(relation::kAreaRatio), ratio_bucket(ratios.area_ratio)});
}

void FactStore::add_model(const std::string& model_id) {
  if (frozen_) throw Error(ErrorCode::StoreFrozen, "fact store is frozen");
  if (!models_.insert(model_id).second) throw Error(ErrorCode::DuplicateModel, model_id);
}

std::vector<std::size_t> FactStore::lookup(std::string_view subject, std::string_view predicate,
                                           std::string_view object) const {
  static const std::vector<std::size_t> none;
  const std::vector<std::size_t>* smallest = nullptr;
  auto consider = [&](const auto& index, std::string_view key) {
    if (key.empty()) return;
    const auto it = index.find(std::string(key));
    const auto* list = it == index.end() ? &none : &it->second;
    if (!smallest || list->size() < smallest->size()) smallest = list;
  };
  consider(by_subject_, subject);
  consider(by_predicate_, predicate);
  consider(by_object_, object);

  std::vector<std::size_t> out;
  auto matches = [&](const Fact& f) {
    return (subject.empty() || f.subject == subject) &&
           (predicate.empty() || f.predicate == predicate) &&
           (object.empty() || f.object == object);
  };
  if (!smallest) {
    out.resize(facts_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
  }
  for (const std::size_t id : *smallest) {
    if (matches(facts_[id])) out.push_back(id);
  }
  return out;
}

std::string FactStore::export_text() const {
  std::string out;
  for (const auto& f : unique_) out += f.subject + " " + f.predicate + " " + f.object + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Conjunctive queries

namespace {

struct Term {
  enum class Kind { Constant, Variable } kind = Kind::Constant;
  std::string name;    // constant text or variable name
  std::string suffix;  // literal tail for "?x/suffix"
};

Term parse_term(const std::string& text) {
  if (text.size() < 2 || text[0] != '?') return {Term::Kind::Constant, text, {}};
  const auto slash = text.find('/');
  if (slash == std::string::npos) return {Term::Kind::Variable, text.substr(1), {}};
  return {Term::Kind::Variable, text.substr(1, slash - 1), text.substr(slash)};
}

using Bindings = std::map<std::string, std::string>;

// Value the term is pinned to under `b`, or empty when still free.
std::string resolved(const Term& t, const Bindings& b) {
  if (t.kind == Term::Kind::Constant) return t.name;
  const auto it = b.find(t.name);
  return it == b.end() ? std::string() : it->second + t.suffix;
}

bool unify(const Term& t, const std::string& value, Bindings& b) {
  if (t.kind == Term::Kind::Constant) return value == t.name;
  std::string bound = value;
  if (!t.suffix.empty()) {
    if (value.size() <= t.suffix.size() ||
        value.compare(value.size() - t.suffix.size(), t.suffix.size(), t.suffix) != 0) {
      return false;
    }
    bound = value.substr(0, value.size() - t.suffix.size());
  }
  const auto [it, inserted] = b.emplace(t.name, bound);
  return inserted || it->second == bound;
}

struct CompiledPattern {
  std::array<Term, 3> terms;
};

void solve(const FactStore& store, std::vector<CompiledPattern>& pending, Bindings& bindings,
           const std::string& model_var, std::set<std::string>& out) {
  if (pending.empty()) {
    const auto it = bindings.find(model_var);
    if (it != bindings.end() && store.has_model(it->second)) out.insert(it->second);
    return;
  }
  // Most selective pattern first under the current bindings.
  std::size_t pick = 0;
  std::vector<std::size_t> best;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto& t = pending[i].terms;
    auto hits = store.lookup(resolved(t[0], bindings), resolved(t[1], bindings),
                             resolved(t[2], bindings));
    if (i == 0 || hits.size() < best.size()) {
      best = std::move(hits);
      pick = i;
    }
    if (best.empty()) return;
  }
  const CompiledPattern chosen = pending[pick];
  pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
  for (const std::size_t id : best) {
    const Fact& f = store.facts()[id];
    Bindings next = bindings;
    if (unify(chosen.terms[0], f.subject, next) && unify(chosen.terms[1], f.predicate, next) &&
        unify(chosen.terms[2], f.object, next)) {
      solve(store, pending, next, model_var, out);
    }
  }
  pending.insert(pending.begin() + static_cast<std::ptrdiff_t>(pick), chosen);
}

}  // namespace

Pattern parse_pattern(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) parts.emplace_back(text.substr(start, i - start));
  }
  if (parts.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "pattern needs 3 terms: '" + std::string(text) + "'");
  }
  return {parts[0], parts[1], parts[2]};
}

std::set<std::string> query(const FactStore& store, std::span<const Pattern> patterns,
                            std::string_view model_var) {
  if (patterns.empty()) return store.models();
  std::vector<CompiledPattern> compiled;
  bool mentions_model = false;
  for (const auto& p : patterns) {
    CompiledPattern c{{parse_term(p.subject), parse_term(p.predicate), parse_term(p.object)}};
    if (c.terms[1].kind == Term::Kind::Constant && !is_registered_predicate(c.terms[1].name)) {
      throw Error(ErrorCode::UnknownPredicate, c.terms[1].name);
    }
    for (const auto& t : c.terms) {
      mentions_model |= t.kind == Term::Kind::Variable && t.name == model_var;
    }
    compiled.push_back(std::move(c));
  }
  if (!mentions_model) {
    throw Error(ErrorCode::InvalidArgument,
                "no pattern mentions the model variable ?" + std::string(model_var));
  }
  std::set<std::string> out;
  Bindings bindings;
  solve(store, compiled, bindings, std::string(model_var), out);
  return out;
}

}  // namespace shape3d
