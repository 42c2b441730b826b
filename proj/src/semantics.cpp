#include "shape3d/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "shape3d/error.hpp"

namespace shape3d {
namespace {

// Portable uniform draw in [0, 1); std::uniform_real_distribution is not
// reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t nearest_center(double value, std::span<const double> centers) {
  std::size_t best = 0;
  double best_d = std::abs(value - centers[0]);
  for (std::size_t i = 1; i < centers.size(); ++i) {
    const double d = std::abs(value - centers[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::string display_name(std::string_view category) {
  std::string out(category);
  std::replace(out.begin(), out.end(), '_', ' ');
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::vector<double> seed_centers(std::span<const double> values, std::size_t k,
                                 std::mt19937_64& rng) {
  const std::size_t n = values.size();
  std::vector<double> centers;
  centers.reserve(k);
  centers.push_back(values[std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n))]);
  std::vector<double> weight(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
      weight[i] = best;
      total += best;
    }
    const double target = uniform01(rng) * total;
    double running = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      running += weight[i];
      if (weight[i] > 0.0 && running > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) {  // rounding at the top end
      for (std::size_t i = n; i-- > 0;) {
        if (weight[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(values[pick]);
  }
  return centers;
}

KMeansResult lloyd(std::span<const double> values, std::vector<double> centers) {
  const std::size_t n = values.size();
  const std::size_t k = centers.size();
  KMeansResult result;
  std::vector<std::size_t> assignment(n, k), previous;
  std::vector<double> sum(k);
  std::vector<std::size_t> count(k);
  for (int iter = 0; iter < kMaxKMeansIterations; ++iter) {
    previous = assignment;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assignment[i] = nearest_center(values[i], centers);
      const double d = values[i] - centers[assignment[i]];
      sse += d * d;
    }
    result.sse_history.push_back(sse);
    result.iterations = iter + 1;
    if (assignment == previous) break;

    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[assignment[i]] += values[i];
      ++count[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) centers[c] = sum[c] / static_cast<double>(count[c]);
    }
  }
  result.centers = std::move(centers);
  return result;
}

}  // namespace

double within_cluster_sse(std::span<const double> values, std::span<const double> centers) {
  double sse = 0.0;
  for (const double v : values) {
    const double d = v - centers[nearest_center(v, centers)];
    sse += d * d;
  }
  return sse;
}

KMeansResult kmeans_1d(std::span<const double> values, std::size_t k, std::uint64_t seed) {
  if (k == 0 || values.size() < k) {
    throw Error(ErrorCode::TooFewValues,
                std::to_string(values.size()) + " values for " + std::to_string(k) + " clusters");
  }
  for (const double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value");
  }
  std::vector<double> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < k) {
    throw Error(ErrorCode::DegenerateClusters,
                std::to_string(distinct.size()) + " distinct values for " + std::to_string(k) +
                    " clusters");
  }

  std::mt19937_64 rng(seed);
  KMeansResult result;
  for (int restart = 0; restart < kKMeansRestarts; ++restart) {
    KMeansResult run = lloyd(values, seed_centers(values, k, rng));
    if (restart == 0 || run.sse_history.back() < result.sse_history.back()) result = std::move(run);
  }
  auto& centers = result.centers;
  std::sort(centers.begin(), centers.end(), std::greater<>());
  if (std::adjacent_find(centers.begin(), centers.end()) != centers.end()) {
    throw Error(ErrorCode::DegenerateClusters, "duplicate cluster centers");
  }
  return result;
}

std::string concept_label(std::string_view category, std::size_t id, std::size_t k) {
  static constexpr std::array<std::string_view, 4> levels = {"High", "Average", "small", "smaller"};
  const std::string name = display_name(category);
  if (k <= levels.size()) return std::string(levels[id]) + " " + name;
  return "Level " + std::to_string(id) + " " + name;
}

ConceptVocabulary build_vocabulary(std::span<const double> values, std::size_t k,
                                   std::uint64_t seed, std::string category) {
  ConceptVocabulary vocab;
  vocab.centers = kmeans_1d(values, k, seed).centers;
  for (std::size_t i = 0; i < vocab.centers.size(); ++i) {
    vocab.labels.push_back(concept_label(category, i, vocab.centers.size()));
  }
  vocab.category = std::move(category);
  return vocab;
}

int assign_concept(double value, const ConceptVocabulary& vocab) {
  if (vocab.centers.empty()) throw Error(ErrorCode::MissingVocabulary, "empty vocabulary");
  return static_cast<int>(nearest_center(value, vocab.centers));
}

SemanticLabel label_model(const ShapeIndexVector& indexes,
                          std::span<const ConceptVocabulary> vocabularies) {
  const auto values = indexes.as_array();
  SemanticLabel label;
  for (const auto& vocab : vocabularies) {
    const auto it = std::find(kIndexCategories.begin(), kIndexCategories.end(), vocab.category);
    if (it == kIndexCategories.end()) {
      throw Error(ErrorCode::MissingVocabulary, "no shape index named '" + vocab.category + "'");
    }
    label[vocab.category] = assign_concept(values[it - kIndexCategories.begin()], vocab);
  }
  return label;
}

std::optional<FeatureMask> feature_mask_by_name(std::string_view name) {
  if (name == "all") return kAllIndexes;
  if (name == "sphericity-convexity-elongation") return kSphericityConvexityElongation;
  return std::nullopt;
}

std::string feature_mask_name(const FeatureMask& mask) {
  if (mask == kAllIndexes) return "all";
  if (mask == kSphericityConvexityElongation) return "sphericity-convexity-elongation";
  std::string out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (!out.empty()) out += ',';
    out += kIndexCategories[i];
  }
  return out;
}

Classifier::Classifier(std::vector<std::vector<double>> features, std::vector<std::string> classes,
                       std::size_t k)
    : features_(std::move(features)), classes_(std::move(classes)) {
  if (features_.size() != classes_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "features and classes differ in length");
  }
  for (const auto& f : features_) {
    if (f.size() != features_.front().size()) {
      throw Error(ErrorCode::DimensionMismatch, "training vectors differ in dimension");
    }
  }
  k_ = std::clamp<std::size_t>(k, 1, std::max<std::size_t>(1, features_.size()));
}

std::string Classifier::classify(std::span<const double> query,
                                 std::optional<std::size_t> exclude) const {
  const std::size_t usable = features_.size() - (exclude && *exclude < features_.size() ? 1 : 0);
  if (usable == 0) throw Error(ErrorCode::EmptyClassifier, "no training records");
  if (query.size() != dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.size()) +
                                                  " components, expected " +
                                                  std::to_string(dimension()));
  }

  std::vector<std::pair<double, std::size_t>> neighbours;
  neighbours.reserve(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (exclude && *exclude == i) continue;
    double d = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double diff = query[j] - features_[i][j];
      d += diff * diff;
    }
    neighbours.emplace_back(d, i);
  }
  const std::size_t k = std::min(k_, neighbours.size());
  std::partial_sort(neighbours.begin(), neighbours.begin() + static_cast<std::ptrdiff_t>(k),
                    neighbours.end());

  std::map<std::string, std::size_t> votes;
  std::size_t top = 0;
  for (std::size_t i = 0; i < k; ++i) top = std::max(top, ++votes[classes_[neighbours[i].second]]);
  // Vote ties: the tied class whose member is nearest wins.
  for (std::size_t i = 0; i < k; ++i) {
    const auto& cls = classes_[neighbours[i].second];
    if (votes[cls] == top) return cls;
  }
  return classes_[neighbours.front().second];
}

}  // namespace shape3d
