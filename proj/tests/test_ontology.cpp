#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "shape3d/error.hpp"
#include "shape3d/ontology.hpp"
#include "shape3d/primitives.hpp"
#include "support.hpp"

using namespace shape3d;
using test_support::uniform01;

namespace {

double sampled_segment_distance(const Segment& s, const Segment& t, int steps) {
  double best = 1e300;
  for (int i = 0; i <= steps; ++i) {
    const Vec3 p = s.a + (s.b - s.a) * (double(i) / steps);
    for (int j = 0; j <= steps; ++j) {
      const Vec3 q = t.a + (t.b - t.a) * (double(j) / steps);
      best = std::min(best, (p - q).norm());
    }
  }
  return best;
}

Vec3 random_vec(std::mt19937_64& rng) {
  return Vec3(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
}

SpatialEntities bare_entities(double scale) {
  SpatialEntities e;
  e.scale = scale;
  e.points = {Vec3::Zero(), Vec3(10, 10, 10), Vec3(-10, 10, 10), Vec3(10, -10, 10)};
  return e;
}

bool has_fact(const std::vector<Fact>& facts, const Fact& f) {
  return std::find(facts.begin(), facts.end(), f) != facts.end();
}

struct Corpus {
  FactStore store;
  std::vector<std::string> ids;
};

Corpus five_model_store() {
  Corpus c;
  std::mt19937_64 rng(3);
  const std::vector<Mesh> meshes = {
      primitives::icosphere(2), primitives::box(4, 1, 1, 2), primitives::spiky_star(2, 2.0),
      primitives::perturbed(primitives::icosphere(2), 0.05, rng), primitives::torus(24, 12, 2, 0.6)};
  std::vector<DescriptorVector> descs;
  for (const auto& m : meshes) descs.push_back(descriptor_vector(m));
  std::vector<ConceptVocabulary> vocabs;
  for (std::size_t cat = 0; cat < kIndexCategories.size(); ++cat) {
    std::vector<double> values;
    for (const auto& d : descs) values.push_back(d.indexes.as_array()[cat]);
    std::set<double> distinct(values.begin(), values.end());
    vocabs.push_back(build_vocabulary(values, std::min<std::size_t>(2, distinct.size()), 1,
                                      std::string(kIndexCategories[cat])));
  }
  for (std::size_t i = 0; i < descs.size(); ++i) {
    const std::string id = "m" + std::to_string(i + 1);
    const auto facts =
        qualitative_relations(spatial_entities(descs[i].landmarks, descs[i].measures));
    c.store.assert_model(id, label_model(descs[i].indexes, vocabs), facts, descs[i].tetra);
    c.ids.push_back(id);
  }
  c.store.freeze();
  return c;
}

// Brute force: for every model id and every value of the second variable,
// substitute and check each pattern against the raw fact list.
std::set<std::string> brute_query(const FactStore& store, const std::vector<Pattern>& patterns) {
  std::set<std::string> domain;
  for (const auto& f : store.facts()) {
    domain.insert(f.subject);
    domain.insert(f.object);
  }
  auto subst = [](const std::string& term, const std::string& m, const std::string& x) {
    if (term.rfind("?m", 0) == 0) return m + term.substr(2);
    if (term.rfind("?x", 0) == 0) return x + term.substr(2);
    return term;
  };
  std::set<std::string> out;
  for (const auto& m : store.models()) {
    for (const auto& x : domain) {
      bool all = true;
      for (const auto& p : patterns) {
        const Fact want{subst(p.subject, m, x), subst(p.predicate, m, x), subst(p.object, m, x)};
        if (std::find(store.facts().begin(), store.facts().end(), want) == store.facts().end()) {
          all = false;
          break;
        }
      }
      if (all) out.insert(m);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("ratio buckets") {
  CHECK(ratio_bucket(0.23) == "q2");
  CHECK(ratio_bucket(0.0) == "q0");
  CHECK(ratio_bucket(0.999) == "q9");
  CHECK(ratio_bucket(1.0) == "q9");
  CHECK(ratio_bucket(0.1) == "q1");
}

TEST_CASE("segment distances against sampling") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Segment s{random_vec(rng), random_vec(rng)};
    const Segment t{random_vec(rng), random_vec(rng)};
    const double exact = segment_segment_distance(s, t);
    const double sampled = sampled_segment_distance(s, t, 400);
    CHECK(exact <= sampled + 1e-12);
    CHECK(sampled - exact < 0.02);
    const Vec3 p = random_vec(rng);
    double best = 1e300;
    for (int i = 0; i <= 2000; ++i) best = std::min(best, (p - (s.a + (s.b - s.a) * (i / 2000.0))).norm());
    CHECK(point_segment_distance(p, s) <= best + 1e-12);
    CHECK(best - point_segment_distance(p, s) < 2e-3);
  }
  const Segment x{Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  const Segment y{Vec3(0, -1, 3), Vec3(0, 1, 3)};
  CHECK(segment_segment_distance(x, y) == doctest::Approx(3.0));
  const Segment parallel{Vec3(-1, 2, 0), Vec3(1, 2, 0)};
  CHECK(segment_segment_distance(x, parallel) == doctest::Approx(2.0));
  const Segment dot{Vec3(5, 0, 0), Vec3(5, 0, 0)};
  CHECK(segment_segment_distance(x, dot) == doctest::Approx(4.0));
}

TEST_CASE("spatial entities of the unit cube") {
  const auto d = descriptor_vector(primitives::unit_cube());
  const auto e = spatial_entities(d.landmarks, d.measures);
  REQUIRE(e.lines.size() == 4);
  for (int i = 0; i < 3; ++i) {
    const auto& seg = e.lines[i].second;
    CHECK((seg.b - seg.a).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(((seg.a + seg.b) / 2.0).norm() < 1e-12);
  }
  CHECK(e.lines[3].first == "r13");
  CHECK(e.scale == d.measures.esd_volume);
  CHECK(e.planes.front().first == "plan");

  auto flat = d.measures;
  flat.extents[2] = 0.0;
  try {
    spatial_entities(d.landmarks, flat);
    FAIL("expected DegenerateEntity");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DegenerateEntity);
  }
}

TEST_CASE("relation thresholds") {
  const double scale = 10.0;
  const double tau = 0.05 * scale;
  auto e = bare_entities(scale);
  e.lines.emplace_back("axis1", Segment{Vec3(-5, 0, 0), Vec3(5, 0, 0)});
  e.lines.emplace_back("axis2", Segment{Vec3(0, -5, 10 * tau), Vec3(0, 5, 10 * tau)});
  e.points[1] = Vec3(2, 0, 0);  // on axis1
  e.points[2] = Vec3(0, 0, 1.5 * tau);  // adjacent to P1
  auto facts = qualitative_relations(e);
  CHECK(has_fact(facts, {"P2", "On", "axis1"}));
  CHECK(has_fact(facts, {"P1", "Adjacent", "P3"}));
  CHECK(has_fact(facts, {"axis1", "NotCross", "axis2"}));
  CHECK_FALSE(has_fact(facts, {"axis1", "Cross", "axis2"}));

  e.points[1] = Vec3::Zero();
  facts = qualitative_relations(e);
  CHECK(has_fact(facts, {"P1", "Overlap", "P2"}));

  e.lines[1].second = Segment{Vec3(0, -5, 0.5 * tau), Vec3(0, 5, 0.5 * tau)};
  facts = qualitative_relations(e);
  CHECK(has_fact(facts, {"axis1", "Cross", "axis2"}));

  e.planes.emplace_back("plan", Plane{Vec3::Zero(), Vec3::UnitZ()});
  facts = qualitative_relations(e);
  CHECK(has_fact(facts, {"axis1", "Contained", "plan"}));
  CHECK(has_fact(facts, {"axis2", "Contained", "plan"}));
  e.lines[1].second = Segment{Vec3(0, -5, 1.5 * tau), Vec3(0, 5, 1.5 * tau)};
  facts = qualitative_relations(e);
  CHECK(has_fact(facts, {"axis2", "Adjacent", "plan"}));
  e.lines[1].second = Segment{Vec3(0, -5, 3 * tau), Vec3(0, 5, 3 * tau)};
  facts = qualitative_relations(e);
  CHECK_FALSE(has_fact(facts, {"axis2", "Adjacent", "plan"}));
  CHECK_FALSE(has_fact(facts, {"axis2", "Contained", "plan"}));

  CHECK_THROWS_AS(qualitative_relations(e, 0.0), Error);
  CHECK_THROWS_AS(qualitative_relations(e, 0.5), Error);
}

TEST_CASE("relations are rigid and scale invariant") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto blob = test_support::irregular_blob(rng);
    const auto d0 = descriptor_vector(blob);
    const auto moved = rigid_transform(blob, primitives::random_rotation(rng), Vec3(3, 1, -2));
    const auto d1 = descriptor_vector(moved);
    const auto d2 = descriptor_vector(scaled(blob, 3.5));
    auto f0 = qualitative_relations(spatial_entities(d0.landmarks, d0.measures));
    auto f1 = qualitative_relations(spatial_entities(d1.landmarks, d1.measures));
    auto f2 = qualitative_relations(spatial_entities(d2.landmarks, d2.measures));
    std::sort(f0.begin(), f0.end());
    std::sort(f1.begin(), f1.end());
    std::sort(f2.begin(), f2.end());
    CHECK(f0 == f1);
    CHECK(f0 == f2);
  }
}

TEST_CASE("fact store basics") {
  FactStore store;
  SemanticLabel label = {{"sphericity", 0}, {"elongation", 3}};
  const std::vector<Fact> rel = {{"P1", "Overlap", "P2"}, {"P2", "On", "axis1"}};
  store.assert_model("m1", label, rel, TetraRatios{0.23, 0.61});
  CHECK(store.has_model("m1"));
  const std::vector<Pattern> q = {parse_pattern("?m sphericity 0")};
  CHECK(query(store, q) == std::set<std::string>{"m1"});
  CHECK(store.lookup("m1", "volume_ratio", "q2").size() == 1);
  CHECK(store.lookup("m1", "area_ratio", "q6").size() == 1);
  // Symmetric relations are found from both sides.
  CHECK(store.lookup("m1/P2", "Overlap", "m1/P1").size() == 1);
  CHECK(store.lookup("m1/axis1", "On", "m1/P2").empty());

  try {
    store.assert_model("m1", label, rel, TetraRatios{});
    FAIL("expected DuplicateModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateModel);
  }
  CHECK_FALSE(store.add({"m1", "sphericity", "0"}));
  try {
    store.add({"m1", "roundness", "0"});
    FAIL("expected UnknownPredicate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownPredicate);
  }
  const std::vector<Pattern> bad = {parse_pattern("?m roundness 0")};
  CHECK_THROWS_AS(query(store, bad), Error);
  const std::vector<Pattern> no_model = {parse_pattern("?x sphericity 0")};
  CHECK_THROWS_AS(query(store, no_model), Error);
  CHECK_THROWS_AS(parse_pattern("?m sphericity"), Error);

  store.freeze();
  try {
    store.add({"m2", "sphericity", "1"});
    FAIL("expected StoreFrozen");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StoreFrozen);
  }
  CHECK(query(store, std::vector<Pattern>{}) == std::set<std::string>{"m1"});
}

TEST_CASE("export is sorted with three tokens per line") {
  const auto corpus = five_model_store();
  const std::string text = corpus.store.export_text();
  std::istringstream in(text);
  std::string line, previous;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string a, b, c, extra;
    CHECK(static_cast<bool>(words >> a >> b >> c));
    CHECK_FALSE(static_cast<bool>(words >> extra));
    if (count > 0) CHECK(std::tie(previous) <= std::tie(line));
    previous = line;
    ++count;
  }
  CHECK(count == corpus.store.facts().size());
}

TEST_CASE("lookup matches a linear scan") {
  const auto corpus = five_model_store();
  const auto& facts = corpus.store.facts();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const Fact& pick = facts[rng() % facts.size()];
    const std::string s = rng() % 2 ? pick.subject : "";
    const std::string p = rng() % 2 ? pick.predicate : "";
    const std::string o = rng() % 2 ? pick.object : "";
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < facts.size(); ++i) {
      if ((s.empty() || facts[i].subject == s) && (p.empty() || facts[i].predicate == p) &&
          (o.empty() || facts[i].object == o)) {
        expected.push_back(i);
      }
    }
    auto got = corpus.store.lookup(s, p, o);
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
  }
}

TEST_CASE("single-pattern queries match a linear scan") {
  const auto corpus = five_model_store();
  std::set<std::string> predicates;
  for (const auto& f : corpus.store.facts()) predicates.insert(f.predicate);
  for (const auto& pred : predicates) {
    std::set<std::string> objects;
    for (const auto& f : corpus.store.facts())
      if (f.predicate == pred && corpus.store.has_model(f.subject)) objects.insert(f.object);
    for (const auto& obj : objects) {
      const std::vector<Pattern> q = {{"?m", pred, obj}};
      std::set<std::string> expected;
      for (const auto& f : corpus.store.facts())
        if (f.predicate == pred && f.object == obj && corpus.store.has_model(f.subject))
          expected.insert(f.subject);
      CHECK(query(corpus.store, q) == expected);
    }
  }
}

TEST_CASE("conjunctive queries match brute force and are monotone") {
  const auto corpus = five_model_store();
  const std::vector<std::string> pool = {
      "?m sphericity 0",        "?m sphericity 1",         "?m elongation 0",
      "?m convexity_volume 0",  "?m/P2 On ?m/axis1",       "?m/P1 Overlap ?m/P2",
      "?m/axis1 Cross ?m/axis2", "?m/axis1 NotCross ?m/r13", "?m volume_ratio ?x",
      "?m/P3 Adjacent ?x",      "?m/axis1 Contained ?m/plan", "?m/r13 Adjacent ?m/tri"};
  const std::vector<Pattern> example = {parse_pattern("?m sphericity 0"),
                                        parse_pattern("?m/P2 On ?m/axis1")};
  const auto a = query(corpus.store, std::vector<Pattern>{example[0]});
  const auto b = query(corpus.store, std::vector<Pattern>{example[1]});
  std::set<std::string> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
  CHECK(query(corpus.store, example) == both);
  CHECK(query(corpus.store, example) == brute_query(corpus.store, example));

  std::mt19937_64 rng(17);
  int proper = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Pattern> patterns;
    std::set<std::string> previous = corpus.store.models();
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      patterns.push_back(parse_pattern(pool[rng() % pool.size()]));
      const auto got = query(corpus.store, patterns);
      CHECK(got == brute_query(corpus.store, patterns));
      CHECK(std::includes(previous.begin(), previous.end(), got.begin(), got.end()));
      proper += !got.empty() && got.size() < corpus.store.models().size();
      previous = got;
    }
  }
  CHECK(proper > 10);
}

TEST_CASE("custom model variable") {
  const auto corpus = five_model_store();
  const std::vector<Pattern> q = {parse_pattern("?shape sphericity 0")};
  const std::vector<Pattern> same = {parse_pattern("?m sphericity 0")};
  CHECK(query(corpus.store, q, "shape") == query(corpus.store, same));
}
