#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shape3d/descriptors.hpp"

namespace shape3d {

/// Concept levels for one index category. centers[0] is the highest value
/// and carries the "High ..." label.
struct ConceptVocabulary {
  std::string category;
  std::vector<double> centers;
  std::vector<std::string> labels;
};

struct KMeansResult {
  std::vector<double> centers;       // descending
  std::vector<double> sse_history;   // objective after each assignment step
  int iterations = 0;
};

inline constexpr int kMaxKMeansIterations = 100;
inline constexpr int kKMeansRestarts = 10;

/// 1-D Lloyd iterations with k-means++ seeding drawn from `seed`. Several
/// seedings are run from the same stream and the lowest final SSE is kept.
KMeansResult kmeans_1d(std::span<const double> values, std::size_t k, std::uint64_t seed);

ConceptVocabulary build_vocabulary(std::span<const double> values, std::size_t k,
                                   std::uint64_t seed, std::string category = {});

/// Nearest center; ties go to the smaller ID.
int assign_concept(double value, const ConceptVocabulary& vocab);

std::string concept_label(std::string_view category, std::size_t id, std::size_t k);

double within_cluster_sse(std::span<const double> values, std::span<const double> centers);

using SemanticLabel = std::map<std::string, int>;

SemanticLabel label_model(const ShapeIndexVector& indexes,
                          std::span<const ConceptVocabulary> vocabularies);

using FeatureMask = std::array<bool, ShapeIndexVector::kSize>;

inline constexpr FeatureMask kAllIndexes = {true, true, true, true, true, true, true};
// Sphericity, both convexity indexes and elongation.
inline constexpr FeatureMask kSphericityConvexityElongation = {false, false, true, true,
                                                               false, true, true};

std::optional<FeatureMask> feature_mask_by_name(std::string_view name);
std::string feature_mask_name(const FeatureMask& mask);

/// k-nearest-neighbour majority vote under Euclidean distance.
class Classifier {
 public:
  Classifier() = default;
  Classifier(std::vector<std::vector<double>> features, std::vector<std::string> classes,
             std::size_t k);

  /// `exclude` drops one training record (leave-one-out).
  std::string classify(std::span<const double> query,
                       std::optional<std::size_t> exclude = std::nullopt) const;

  std::size_t k() const { return k_; }
  std::size_t size() const { return features_.size(); }
  std::size_t dimension() const { return features_.empty() ? 0 : features_.front().size(); }
  const std::vector<std::string>& classes() const { return classes_; }

 private:
  std::vector<std::vector<double>> features_;
  std::vector<std::string> classes_;
  std::size_t k_ = 1;
};

}  // namespace shape3d
