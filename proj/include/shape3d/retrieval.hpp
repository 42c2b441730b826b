#pragma once

#include <array>
#include <map>
#include <set>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shape3d/descriptors.hpp"
#include "shape3d/ontology.hpp"
#include "shape3d/semantics.hpp"

namespace shape3d {

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> constant;

  static NormStats compute(std::span<const FlatDescriptor> corpus);
};

std::vector<double> normalize(std::span<const double> vector, const NormStats& stats);

struct WeightProfile {
  double measures = 1.0;
  double indexes = 1.0;
  double moments = 1.0;
  std::map<std::size_t, double> overrides;  // component -> multiplier

  std::vector<double> component_weights() const;
};

/// sqrt(sum_g w_g * sum_{i in g} (a_i - b_i)^2) over the descriptor layout.
double weighted_distance(std::span<const double> a, std::span<const double> b,
                         const WeightProfile& weights);

struct IndexParams {
  std::size_t clusters = 4;
  std::size_t knn = 5;
  std::uint64_t seed = 1;
  double epsilon_rel = tol::kRelationEpsilon;
  FeatureMask feature_mask = kAllIndexes;
  FeatureMask ontology_categories = kSphericityConvexityElongation;
};

struct ModelRecord {
  std::string id;
  std::string path;
  std::string class_name;  // ground truth, empty when unknown
  DescriptorVector descriptor;
};

struct IndexedModel {
  ModelRecord record;
  FlatDescriptor flat{};
  std::vector<double> normalized;
  SemanticLabel label;
  std::string predicted_class;
};

struct SkippedModel {
  std::string path;
  std::string reason;
};

/// Frozen corpus index. Built once, then read-only.
struct RetrievalIndex {
  IndexParams params;
  std::string corpus_dir;
  std::vector<IndexedModel> models;  // sorted by id
  std::vector<SkippedModel> skipped;
  std::vector<ConceptVocabulary> vocabularies;
  NormStats stats;
  Classifier classifier;
  FactStore facts;
  std::unordered_map<std::string, std::size_t> position;
  std::vector<double> normalized_matrix;  // row-major, one row per model


  const IndexedModel& model(std::string_view id) const;
  std::vector<double> classifier_features(const std::vector<double>& normalized) const;
};

/// Single-threaded assembly: statistics, vocabularies, labels, classifier,
/// predicted classes and facts. Records are re-sorted by id.
RetrievalIndex assemble_index(std::vector<ModelRecord> records, const IndexParams& params,
                              std::vector<SkippedModel> skipped = {},
                              std::string corpus_dir = {});

struct QueryOptions {
  WeightProfile weights;
  std::size_t k = 12;
  bool use_classifier = true;
  bool use_ontology = true;
  std::optional<std::vector<Pattern>> patterns;  // default: the query's own concepts
};

struct RankedResult {
  std::string model_id;
  double distance = 0.0;
  std::string predicted_class;  // class the query was assigned in stage 1
  bool passed_filter = true;    // false for backfilled results
};

struct QueryTarget {
  std::vector<double> normalized;
  SemanticLabel label;
  std::string predicted_class;
};

QueryTarget query_target(const RetrievalIndex& index, std::string_view model_id);
QueryTarget query_target(const RetrievalIndex& index, const Mesh& mesh);

std::vector<RankedResult> retrieve(const RetrievalIndex& index, const QueryTarget& target,
                                   const QueryOptions& options);
std::vector<RankedResult> retrieve(const RetrievalIndex& index, std::string_view model_id,
                                   const QueryOptions& options);
std::vector<RankedResult> retrieve(const RetrievalIndex& index, const Mesh& mesh,
                                   const QueryOptions& options);

using PrCurve = std::vector<std::pair<double, double>>;  // (recall, precision)

PrCurve precision_recall(std::span<const std::string> ranked,
                         const std::set<std::string>& relevant);

/// Max precision at recall >= r for r = 0, 0.1, ..., 1.
std::array<double, 11> interpolated_precision(const PrCurve& curve);

struct EvalResult {
  std::size_t queries = 0;
  std::array<double, 11> mean_precision{};
};

/// Queries every model with a ground-truth class (or only those in
/// `only_class`) against the full ranked corpus, excluding the query itself.
EvalResult evaluate(const RetrievalIndex& index, const QueryOptions& options,
                    const std::map<std::string, std::set<std::string>>& ground_truth,
                    std::string_view only_class = {});

}  // namespace shape3d
