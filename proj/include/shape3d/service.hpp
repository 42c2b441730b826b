#pragma once

#include <memory>
#include <string>

#include "shape3d/json_io.hpp"
#include "shape3d/retrieval.hpp"

namespace httplib {
class Server;
}

namespace shape3d {

struct Config {
  std::string corpus_dir;
  std::string index_path;
  std::string cla_path;
  std::size_t clusters = 4;
  std::size_t knn_k = 5;
  WeightProfile weights;
  double epsilon_rel = tol::kRelationEpsilon;
  std::uint64_t seed = 1;
  int port = 8080;
  bool parallel = true;
};

void validate(const Config& config);

struct BuildReport {
  std::size_t indexed = 0;
  std::size_t skipped = 0;
  double mean_seconds = 0.0;
  double max_seconds = 0.0;
};

/// Scans corpus_dir recursively for .off files, indexes them and writes the
/// index to index_path. Per-model timings go to "<index_path>.timing.csv".
BuildReport build_index(const Config& config, RetrievalIndex* out = nullptr);

/// Builds the in-memory index without writing it.
RetrievalIndex build_index_in_memory(const Config& config, BuildReport* report = nullptr);

/// Request body of POST /api/query, minus model_id.
QueryOptions query_options_from_json(const nlohmann::json& body, const WeightProfile& defaults = {});

/// Byte-exact JSON text shared by the CLI and the HTTP service.
std::string query_response(const RetrievalIndex& index, const std::string& model_id,
                           const QueryOptions& options);

/// "recall,precision" CSV, 11 interpolated points.
std::string pr_csv(const EvalResult& result);

/// Ground-truth classes recorded in the index.
std::map<std::string, std::set<std::string>> index_ground_truth(const RetrievalIndex& index);

/// HTTP front end over a frozen index. All endpoints are read-only.
class Service {
 public:
  explicit Service(RetrievalIndex index);
  ~Service();

  /// Binds and serves until stop(). Throws PortInUse when the bind fails.
  void listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it; call run() afterwards.
  int bind_any(const std::string& host);
  void run();
  /// Blocks until run() is accepting connections.
  void wait_until_ready() const;
  void stop();

  const RetrievalIndex& index() const { return index_; }

 private:
  void register_routes();

  RetrievalIndex index_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace shape3d
