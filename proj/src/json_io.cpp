#include "shape3d/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shape3d/error.hpp"

namespace shape3d {

using nlohmann::json;

namespace {

void write_value(const json& v, std::string& out) {
  switch (v.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        write_value(item, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        write_value(v[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", d);
        out += buf;
      }
      break;
    }
    default:
      out += v.dump();
  }
}

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 read_vec3(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

template <std::size_t N>
json doubles(const std::array<double, N>& a) {
  json out = json::array();
  for (const double v : a) out.push_back(v);
  return out;
}

template <std::size_t N>
std::array<double, N> read_doubles(const json& j) {
  std::array<double, N> a{};
  if (j.size() != N) throw Error(ErrorCode::DimensionMismatch, "array length in index file");
  for (std::size_t i = 0; i < N; ++i) a[i] = j.at(i).get<double>();
  return a;
}

json mask_json(const FeatureMask& mask) {
  json out = json::array();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(std::string(kIndexCategories[i]));
  }
  return out;
}

FeatureMask read_mask(const json& j) {
  FeatureMask mask{};
  for (const auto& name : j) {
    const auto it = std::find(kIndexCategories.begin(), kIndexCategories.end(), name.get<std::string>());
    if (it == kIndexCategories.end()) throw Error(ErrorCode::InvalidArgument, "unknown category in mask");
    mask[static_cast<std::size_t>(it - kIndexCategories.begin())] = true;
  }
  return mask;
}

DescriptorVector read_descriptor(const json& j) {
  DescriptorVector d;
  const auto& m = j.at("measures");
  auto& out = d.measures;
  out.volume = m.at("volume");
  out.volume_source = m.at("volume_source") == "hull" ? VolumeSource::Hull : VolumeSource::Mesh;
  out.surface_area = m.at("surface_area");
  out.centroid = read_vec3(m.at("centroid"));
  for (int i = 0; i < 3; ++i) out.principal_axes[i] = read_vec3(m.at("principal_axes").at(i));
  out.extents = read_doubles<3>(m.at("extents"));
  out.axis_min = read_doubles<3>(m.at("axis_min"));
  out.axis_max = read_doubles<3>(m.at("axis_max"));
  out.diameter = m.at("diameter");
  out.feret_extents = read_doubles<3>(m.at("feret_extents"));
  out.small_radius = m.at("small_radius");
  out.large_radius = m.at("large_radius");
  out.esd_area = m.at("esd_area");
  out.esd_volume = m.at("esd_volume");
  out.hull_area = m.at("hull_area");
  out.hull_volume = m.at("hull_volume");
  out.plane_normal = read_vec3(m.at("plane_normal"));

  const auto idx = read_doubles<ShapeIndexVector::kSize>(j.at("indexes_array"));
  d.indexes = {idx[0], idx[1], idx[2], idx[3], idx[4], idx[5], idx[6]};
  d.moments = read_doubles<12>(j.at("moments"));
  d.tetra.volume_ratio = j.at("tetra").at("volume_ratio");
  d.tetra.area_ratio = j.at("tetra").at("area_ratio");

  const auto& l = j.at("landmarks");
  for (int i = 0; i < 4; ++i) d.landmarks.points[i] = read_vec3(l.at("points").at(i));
  for (int i = 0; i < 3; ++i) d.landmarks.hull_vertex[i] = l.at("hull_vertex").at(i).get<std::uint32_t>();
  d.landmarks.small_radius = l.at("small_radius");
  d.landmarks.large_radius = l.at("large_radius");
  d.landmarks.angles = read_doubles<3>(l.at("angles"));
  return d;
}

}  // namespace

std::string dump_json(const json& value) {
  std::string out;
  write_value(value, out);
  return out;
}

json descriptor_to_json(const DescriptorVector& d) {
  const auto& m = d.measures;
  json measures = {
      {"volume", m.volume},
      {"volume_source", m.volume_source == VolumeSource::Hull ? "hull" : "mesh"},
      {"surface_area", m.surface_area},
      {"centroid", vec3(m.centroid)},
      {"principal_axes", json::array({vec3(m.principal_axes[0]), vec3(m.principal_axes[1]),
                                      vec3(m.principal_axes[2])})},
      {"extents", doubles(m.extents)},
      {"axis_min", doubles(m.axis_min)},
      {"axis_max", doubles(m.axis_max)},
      {"diameter", m.diameter},
      {"feret_extents", doubles(m.feret_extents)},
      {"small_radius", m.small_radius},
      {"large_radius", m.large_radius},
      {"esd_area", m.esd_area},
      {"esd_volume", m.esd_volume},
      {"hull_area", m.hull_area},
      {"hull_volume", m.hull_volume},
      {"plane_normal", vec3(m.plane_normal)},
  };
  json indexes = json::object();
  const auto values = d.indexes.as_array();
  for (std::size_t i = 0; i < values.size(); ++i) indexes[std::string(kIndexCategories[i])] = values[i];
  json points = json::array();
  for (const auto& p : d.landmarks.points) points.push_back(vec3(p));
  return {
      {"measures", measures},
      {"indexes", indexes},
      {"indexes_array", doubles(values)},
      {"moments", doubles(d.moments)},
      {"tetra", {{"volume_ratio", d.tetra.volume_ratio}, {"area_ratio", d.tetra.area_ratio}}},
      {"landmarks",
       {{"points", points},
        {"hull_vertex", json::array({d.landmarks.hull_vertex[0], d.landmarks.hull_vertex[1],
                                     d.landmarks.hull_vertex[2]})},
        {"small_radius", d.landmarks.small_radius},
        {"large_radius", d.landmarks.large_radius},
        {"angles", doubles(d.landmarks.angles)}}},
  };
}

json to_json(const RetrievalIndex& index) {
  json models = json::array();
  for (const auto& m : index.models) {
    json label = json::object();
    for (const auto& [cat, id] : m.label) label[cat] = id;
    models.push_back({{"id", m.record.id},
                      {"path", m.record.path},
                      {"class", m.record.class_name},
                      {"predicted_class", m.predicted_class},
                      {"label", label},
                      {"descriptor", descriptor_to_json(m.record.descriptor)}});
  }
  json skipped = json::array();
  for (const auto& s : index.skipped) skipped.push_back({{"path", s.path}, {"reason", s.reason}});
  json vocabularies = json::array();
  for (const auto& v : index.vocabularies) {
    vocabularies.push_back({{"category", v.category}, {"centers", v.centers}, {"labels", v.labels}});
  }
  json constant = json::array();
  for (const bool c : index.stats.constant) constant.push_back(c);
  json facts = json::array();
  std::vector<Fact> sorted = index.facts.facts();
  std::sort(sorted.begin(), sorted.end());
  for (const auto& f : sorted) facts.push_back({f.subject, f.predicate, f.object});
  const auto& p = index.params;
  return {
      {"schema_version", kIndexSchemaVersion},
      {"params",
       {{"clusters", p.clusters},
        {"knn", p.knn},
        {"seed", p.seed},
        {"epsilon_rel", p.epsilon_rel},
        {"feature_mask", mask_json(p.feature_mask)},
        {"ontology_categories", mask_json(p.ontology_categories)}}},
      {"corpus_dir", index.corpus_dir},
      {"models", models},
      {"skipped", skipped},
      {"vocabularies", vocabularies},
      {"norm_stats", {{"mean", index.stats.mean}, {"stddev", index.stats.stddev}, {"constant", constant}}},
      {"classifier", {{"k", index.classifier.k()}, {"training_size", index.classifier.size()}}},
      {"facts", facts},
  };
}

RetrievalIndex index_from_json(const json& doc) {
  if (doc.value("schema_version", 0) != kIndexSchemaVersion) {
    throw Error(ErrorCode::MalformedHeader, "unsupported index schema version");
  }
  RetrievalIndex index;
  const auto& p = doc.at("params");
  index.params.clusters = p.at("clusters");
  index.params.knn = p.at("knn");
  index.params.seed = p.at("seed");
  index.params.epsilon_rel = p.at("epsilon_rel");
  index.params.feature_mask = read_mask(p.at("feature_mask"));
  index.params.ontology_categories = read_mask(p.at("ontology_categories"));
  index.corpus_dir = doc.at("corpus_dir");

  const auto& ns = doc.at("norm_stats");
  index.stats.mean = ns.at("mean").get<std::vector<double>>();
  index.stats.stddev = ns.at("stddev").get<std::vector<double>>();
  index.stats.constant = ns.at("constant").get<std::vector<bool>>();

  for (const auto& v : doc.at("vocabularies")) {
    index.vocabularies.push_back({v.at("category"), v.at("centers").get<std::vector<double>>(),
                                  v.at("labels").get<std::vector<std::string>>()});
  }
  for (const auto& s : doc.at("skipped")) index.skipped.push_back({s.at("path"), s.at("reason")});

  for (const auto& j : doc.at("models")) {
    IndexedModel m;
    m.record.id = j.at("id");
    m.record.path = j.at("path");
    m.record.class_name = j.at("class");
    m.record.descriptor = read_descriptor(j.at("descriptor"));
    m.predicted_class = j.at("predicted_class");
    for (const auto& [cat, id] : j.at("label").items()) m.label[cat] = id.get<int>();
    m.flat = flatten(m.record.descriptor);
    m.normalized = normalize(m.flat, index.stats);
    if (!index.position.emplace(m.record.id, index.models.size()).second) {
      throw Error(ErrorCode::DuplicateModel, m.record.id);
    }
    index.normalized_matrix.insert(index.normalized_matrix.end(), m.normalized.begin(), m.normalized.end());
    index.models.push_back(std::move(m));
  }

  const bool supervised = std::any_of(index.models.begin(), index.models.end(),
                                      [](const IndexedModel& m) { return !m.record.class_name.empty(); });
  std::vector<std::vector<double>> features;
  std::vector<std::string> classes;
  for (const auto& m : index.models) {
    std::string cls = m.record.class_name;
    if (!supervised) {
      for (std::size_t c = 0; c < kIndexCategories.size(); ++c) {
        if (!index.params.ontology_categories[c]) continue;
        const auto it = m.label.find(std::string(kIndexCategories[c]));
        if (it == m.label.end()) continue;
        if (!cls.empty()) cls += ',';
        cls += it->first + "=" + std::to_string(it->second);
      }
    }
    if (cls.empty()) continue;
    features.push_back(index.classifier_features(m.normalized));
    classes.push_back(cls);
  }
  index.classifier = Classifier(std::move(features), std::move(classes), index.params.knn);

  for (const auto& m : index.models) index.facts.add_model(m.record.id);
  for (const auto& f : doc.at("facts")) index.facts.add({f.at(0), f.at(1), f.at(2)});
  index.facts.freeze();
  return index;
}

void write_index(const RetrievalIndex& index, const std::string& path) {
  const std::string text = dump_json(to_json(index)) + "\n";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw Error(ErrorCode::WriteFailure, "cannot write " + path);
  }
}

RetrievalIndex read_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open index " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return index_from_json(json::parse(buffer.str()));
}

json results_to_json(std::string_view query_id, const std::vector<RankedResult>& results) {
  json list = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    list.push_back({{"rank", i + 1},
                    {"id", r.model_id},
                    {"distance", r.distance},
                    {"predicted_class", r.predicted_class},
                    {"passed_filter", r.passed_filter}});
  }
  return {{"query", std::string(query_id)}, {"results", list}};
}

}  // namespace shape3d
