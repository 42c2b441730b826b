#include "shape3d/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "shape3d/error.hpp"
#include "shape3d/kernels.hpp"

namespace shape3d {

NormStats NormStats::compute(std::span<const FlatDescriptor> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyIndex, "no vectors for normalisation");
  const double n = static_cast<double>(corpus.size());
  NormStats s;
  s.mean.assign(kDescriptorDims, 0.0);
  s.stddev.assign(kDescriptorDims, 0.0);
  s.constant.assign(kDescriptorDims, false);
  for (const auto& v : corpus) {
    for (std::size_t i = 0; i < kDescriptorDims; ++i) s.mean[i] += v[i];
  }
  for (auto& m : s.mean) m /= n;
  for (const auto& v : corpus) {
    for (std::size_t i = 0; i < kDescriptorDims; ++i) {
      const double d = v[i] - s.mean[i];
      s.stddev[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < kDescriptorDims; ++i) {
    s.stddev[i] = std::sqrt(s.stddev[i] / n);
    s.constant[i] = s.stddev[i] <= tol::kConstantRelative * std::max(1.0, std::abs(s.mean[i]));
  }
  return s;
}

std::vector<double> normalize(std::span<const double> vector, const NormStats& stats) {
  if (vector.size() != stats.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector does not match normalisation stats");
  }
  std::vector<double> out(vector.size());
  for (std::size_t i = 0; i < vector.size(); ++i) {
    out[i] = stats.constant[i] ? 0.0 : (vector[i] - stats.mean[i]) / stats.stddev[i];
  }
  return out;
}

std::vector<double> WeightProfile::component_weights() const {
  if (measures < 0.0 || indexes < 0.0 || moments < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
  }
  std::vector<double> w(kDescriptorDims);
  for (std::size_t i = 0; i < kDescriptorDims; ++i) {
    switch (group_of(i)) {
      case DescriptorGroup::Measures: w[i] = measures; break;
      case DescriptorGroup::Indexes: w[i] = indexes; break;
      case DescriptorGroup::Moments: w[i] = moments; break;
    }
  }
  for (const auto& [component, factor] : overrides) {
    if (component >= kDescriptorDims || factor < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "bad weight override");
    }
    w[component] *= factor;
  }
  if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0.0; })) {
    throw Error(ErrorCode::AllZeroWeights, "every weight is zero");
  }
  return w;
}

double weighted_distance(std::span<const double> a, std::span<const double> b,
                         const WeightProfile& weights) {
  if (a.size() != b.size() || a.size() != kDescriptorDims) {
    throw Error(ErrorCode::DimensionMismatch, "distance operands differ in size");
  }
  const auto w = weights.component_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Index assembly

const IndexedModel& RetrievalIndex::model(std::string_view id) const {
  const auto it = position.find(std::string(id));
  if (it == position.end()) throw Error(ErrorCode::UnknownModel, std::string(id));
  return models[it->second];
}

std::vector<double> RetrievalIndex::classifier_features(const std::vector<double>& normalized) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < ShapeIndexVector::kSize; ++i) {
    if (params.feature_mask[i]) out.push_back(normalized.at(kMeasureDims + i));
  }
  return out;
}

namespace {

std::string concept_bucket(const SemanticLabel& label, const FeatureMask& categories) {
  std::string out;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (!categories[i]) continue;
    const auto it = label.find(std::string(kIndexCategories[i]));
    if (it == label.end()) continue;
    if (!out.empty()) out += ',';
    out += std::string(kIndexCategories[i]) + "=" + std::to_string(it->second);
  }
  return out;
}

}  // namespace

RetrievalIndex assemble_index(std::vector<ModelRecord> records, const IndexParams& params,
                              std::vector<SkippedModel> skipped, std::string corpus_dir) {
  if (records.empty()) throw Error(ErrorCode::EmptyIndex, "no models to index");
  if (params.clusters == 0 || params.knn == 0) {
    throw Error(ErrorCode::InvalidArgument, "cluster and neighbour counts must be >= 1");
  }
  std::sort(records.begin(), records.end(),
            [](const ModelRecord& a, const ModelRecord& b) { return a.id < b.id; });

  RetrievalIndex index;
  index.params = params;
  index.corpus_dir = std::move(corpus_dir);
  index.skipped = std::move(skipped);

  std::vector<FlatDescriptor> flats;
  flats.reserve(records.size());
  for (auto& r : records) {
    if (!index.position.emplace(r.id, index.models.size()).second) {
      throw Error(ErrorCode::DuplicateModel, r.id);
    }
    IndexedModel m;
    m.flat = flatten(r.descriptor);
    m.record = std::move(r);
    flats.push_back(m.flat);
    index.models.push_back(std::move(m));
  }

  index.stats = NormStats::compute(flats);
  for (auto& m : index.models) {
    m.normalized = normalize(m.flat, index.stats);
    index.normalized_matrix.insert(index.normalized_matrix.end(), m.normalized.begin(),
                                   m.normalized.end());
  }

  // One 1-D vocabulary per shape index, capped by the number of distinct values.
  for (std::size_t c = 0; c < kIndexCategories.size(); ++c) {
    std::vector<double> values;
    for (const auto& m : index.models) values.push_back(m.record.descriptor.indexes.as_array()[c]);
    std::vector<double> distinct = values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const std::size_t k = std::min(params.clusters, distinct.size());
    index.vocabularies.push_back(
        build_vocabulary(values, k, params.seed + c, std::string(kIndexCategories[c])));
  }
  for (auto& m : index.models) {
    m.label = label_model(m.record.descriptor.indexes, index.vocabularies);
  }

  // Ground-truth classes when any are known, concept buckets otherwise.
  const bool supervised = std::any_of(index.models.begin(), index.models.end(),
                                      [](const IndexedModel& m) { return !m.record.class_name.empty(); });
  std::vector<std::vector<double>> features;
  std::vector<std::string> classes;
  for (const auto& m : index.models) {
    const std::string cls =
        supervised ? m.record.class_name : concept_bucket(m.label, params.ontology_categories);
    if (cls.empty()) continue;
    features.push_back(index.classifier_features(m.normalized));
    classes.push_back(cls);
  }
  index.classifier = Classifier(std::move(features), std::move(classes), params.knn);
  for (auto& m : index.models) {
    m.predicted_class = index.classifier.classify(index.classifier_features(m.normalized));
  }

  for (const auto& m : index.models) {
    std::vector<Fact> relations;
    try {
      const auto entities = spatial_entities(m.record.descriptor.landmarks, m.record.descriptor.measures);
      relations = qualitative_relations(entities, params.epsilon_rel);
    } catch (const Error&) {
      // Degenerate geometry: concept and ratio facts only.
    }
    index.facts.assert_model(m.record.id, m.label, relations, m.record.descriptor.tetra);
  }
  index.facts.freeze();
  return index;
}

// ---------------------------------------------------------------------------
// Queries

QueryTarget query_target(const RetrievalIndex& index, std::string_view model_id) {
  const auto& m = index.model(model_id);
  return {m.normalized, m.label, m.predicted_class};
}

QueryTarget query_target(const RetrievalIndex& index, const Mesh& mesh) {
  if (index.models.empty()) throw Error(ErrorCode::EmptyIndex, "index has no models");
  const auto d = descriptor_vector(mesh);
  QueryTarget t;
  t.normalized = normalize(flatten(d), index.stats);
  t.label = label_model(d.indexes, index.vocabularies);
  t.predicted_class = index.classifier.classify(index.classifier_features(t.normalized));
  return t;
}

std::vector<RankedResult> retrieve(const RetrievalIndex& index, const QueryTarget& target,
                                   const QueryOptions& options) {
  const std::size_t n = index.models.size();
  if (n == 0) throw Error(ErrorCode::EmptyIndex, "index has no models");
  if (options.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");

  std::vector<char> pass(n, 1);
  if (options.use_classifier) {
    for (std::size_t i = 0; i < n; ++i) {
      pass[i] = index.models[i].predicted_class == target.predicted_class;
    }
  }
  if (options.use_ontology) {
    std::vector<Pattern> patterns;
    if (options.patterns) {
      patterns = *options.patterns;
    } else {
      for (std::size_t c = 0; c < kIndexCategories.size(); ++c) {
        if (!index.params.ontology_categories[c]) continue;
        const auto it = target.label.find(std::string(kIndexCategories[c]));
        if (it != target.label.end()) {
          patterns.push_back({"?m", it->first, std::to_string(it->second)});
        }
      }
    }
    if (!patterns.empty()) {
      const auto allowed = query(index.facts, patterns);
      for (std::size_t i = 0; i < n; ++i) {
        pass[i] = pass[i] && allowed.count(index.models[i].record.id) > 0;
      }
    }
  }

  const auto weights = options.weights.component_weights();
  const auto dist = kernels::omp::distance_scan(target.normalized, index.normalized_matrix, weights);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pass[a] != pass[b]) return pass[a] > pass[b];
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return index.models[a].record.id < index.models[b].record.id;
  });

  const std::size_t k = std::min(options.k, n);
  std::vector<RankedResult> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = order[r];
    out.push_back({index.models[i].record.id, dist[i],
                   options.use_classifier ? target.predicted_class : std::string(), pass[i] != 0});
  }
  return out;
}

std::vector<RankedResult> retrieve(const RetrievalIndex& index, std::string_view model_id,
                                   const QueryOptions& options) {
  return retrieve(index, query_target(index, model_id), options);
}

std::vector<RankedResult> retrieve(const RetrievalIndex& index, const Mesh& mesh,
                                   const QueryOptions& options) {
  return retrieve(index, query_target(index, mesh), options);
}

// ---------------------------------------------------------------------------
// Evaluation

PrCurve precision_recall(std::span<const std::string> ranked, const std::set<std::string>& relevant) {
  if (relevant.empty()) throw Error(ErrorCode::EmptyRelevantSet, "no relevant models");
  std::set<std::string> seen;
  PrCurve curve;
  curve.reserve(ranked.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (!seen.insert(ranked[r]).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate ranked id " + ranked[r]);
    }
    hits += relevant.count(ranked[r]);
    curve.emplace_back(static_cast<double>(hits) / static_cast<double>(relevant.size()),
                       static_cast<double>(hits) / static_cast<double>(r + 1));
  }
  return curve;
}

std::array<double, 11> interpolated_precision(const PrCurve& curve) {
  std::array<double, 11> out{};
  for (std::size_t level = 0; level < out.size(); ++level) {
    const double recall = static_cast<double>(level) / 10.0;
    for (const auto& [r, p] : curve) {
      if (r >= recall - 1e-12) out[level] = std::max(out[level], p);
    }
  }
  return out;
}

EvalResult evaluate(const RetrievalIndex& index, const QueryOptions& options,
                    const std::map<std::string, std::set<std::string>>& ground_truth,
                    std::string_view only_class) {
  EvalResult result;
  QueryOptions all = options;
  all.k = index.models.size();
  for (const auto& [cls, members] : ground_truth) {
    if (!only_class.empty() && cls != only_class) continue;
    for (const auto& query_id : members) {
      if (!index.position.count(query_id)) continue;
      std::set<std::string> relevant;
      for (const auto& m : members) {
        if (m != query_id && index.position.count(m)) relevant.insert(m);
      }
      if (relevant.empty()) continue;
      std::vector<std::string> ranked;
      for (const auto& r : retrieve(index, query_id, all)) {
        if (r.model_id != query_id) ranked.push_back(r.model_id);
      }
      const auto interp = interpolated_precision(precision_recall(ranked, relevant));
      for (std::size_t i = 0; i < interp.size(); ++i) result.mean_precision[i] += interp[i];
      ++result.queries;
    }
  }
  if (result.queries > 0) {
    for (auto& p : result.mean_precision) p /= static_cast<double>(result.queries);
  }
  return result;
}

}  // namespace shape3d
