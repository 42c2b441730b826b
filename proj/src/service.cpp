#include "shape3d/service.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "shape3d/cla.hpp"
#include "shape3d/error.hpp"
#include "shape3d/kernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace shape3d {

void validate(const Config& c) {
  if (c.clusters < 1 || c.knn_k < 1) {
    throw Error(ErrorCode::InvalidArgument, "cluster and neighbour counts must be >= 1");
  }
  if (!(c.epsilon_rel > 0.0 && c.epsilon_rel < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon_rel must lie in (0, 0.5)");
  }
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::InvalidArgument, "bad port");
}

namespace {

struct CorpusFile {
  std::string relative;
  std::string id;
};

std::vector<CorpusFile> scan_corpus(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::NoModelsFound, dir + " is not a directory");
  std::vector<CorpusFile> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".off") continue;
    files.push_back({fs::relative(entry.path(), dir).generic_string(), entry.path().stem().string()});
  }
  std::sort(files.begin(), files.end(),
            [](const CorpusFile& a, const CorpusFile& b) { return a.relative < b.relative; });
  if (files.empty()) throw Error(ErrorCode::NoModelsFound, "no .off files under " + dir);
  return files;
}

// PSB ids are bare numbers while files are named m<id>.off.
std::string class_of(const std::map<std::string, std::string>& classes, const std::string& id) {
  if (auto it = classes.find(id); it != classes.end()) return it->second;
  if (id.size() > 1 && id[0] == 'm') {
    if (auto it = classes.find(id.substr(1)); it != classes.end()) return it->second;
  }
  return {};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnknownModel, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

RetrievalIndex build_index_in_memory(const Config& config, BuildReport* report) {
  validate(config);
  const auto files = scan_corpus(config.corpus_dir);
  std::map<std::string, std::string> classes;
  if (!config.cla_path.empty()) classes = read_cla_file(config.cla_path).model_classes();

  std::vector<SkippedModel> skipped;
  std::vector<Mesh> meshes;
  std::vector<std::string> paths;
  std::set<std::string> ids;
  for (const auto& f : files) {
    if (!ids.insert(f.id).second) {
      skipped.push_back({f.relative, "duplicate model id '" + f.id + "'"});
      continue;
    }
    try {
      meshes.push_back(parse_off(read_text(config.corpus_dir + "/" + f.relative), f.id));
      paths.push_back(f.relative);
    } catch (const std::exception& e) {
      skipped.push_back({f.relative, e.what()});
    }
  }

  const auto extracted = config.parallel ? kernels::omp::extract_descriptors(meshes)
                                         : kernels::serial::extract_descriptors(meshes);
  std::vector<ModelRecord> records;
  BuildReport local;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const auto& e = extracted[i];
    if (const auto* error = std::get_if<std::string>(&e.result)) {
      skipped.push_back({paths[i], *error});
      continue;
    }
    records.push_back({meshes[i].source_id, paths[i], class_of(classes, meshes[i].source_id),
                       std::get<DescriptorVector>(e.result)});
    local.mean_seconds += e.seconds;
    local.max_seconds = std::max(local.max_seconds, e.seconds);
  }
  std::sort(skipped.begin(), skipped.end(),
            [](const SkippedModel& a, const SkippedModel& b) { return a.path < b.path; });
  for (const auto& s : skipped) std::cerr << "skipped " << s.path << ": " << s.reason << "\n";
  if (records.empty()) throw Error(ErrorCode::NoModelsFound, "no model could be indexed");

  local.indexed = records.size();
  local.skipped = skipped.size();
  local.mean_seconds /= static_cast<double>(records.size());

  IndexParams params;
  params.clusters = config.clusters;
  params.knn = config.knn_k;
  params.seed = config.seed;
  params.epsilon_rel = config.epsilon_rel;

  if (report) {
    *report = local;
    // Timings stay out of the index so that rebuilding it is byte-identical.
    if (!config.index_path.empty()) {
      std::ofstream csv(config.index_path + ".timing.csv");
      csv << "id,vertices,faces,seconds\n";
      for (std::size_t i = 0; i < meshes.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", extracted[i].seconds);
        csv << meshes[i].source_id << "," << meshes[i].vertices.size() << ","
            << meshes[i].faces.size() << "," << buf << "\n";
      }
    }
  }
  return assemble_index(std::move(records), params, std::move(skipped), config.corpus_dir);
}

BuildReport build_index(const Config& config, RetrievalIndex* out) {
  BuildReport report;
  RetrievalIndex index = build_index_in_memory(config, &report);
  write_index(index, config.index_path);
  if (out) *out = std::move(index);
  return report;
}

QueryOptions query_options_from_json(const json& body, const WeightProfile& defaults) {
  QueryOptions options;
  options.weights = defaults;
  if (body.contains("k")) {
    const auto k = body.at("k").get<long long>();
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    options.k = static_cast<std::size_t>(k);
  }
  if (body.contains("weights")) {
    const auto& w = body.at("weights");
    if (w.is_array()) {
      if (w.size() != 3) throw Error(ErrorCode::InvalidArgument, "weights needs 3 values");
      options.weights.measures = w.at(0);
      options.weights.indexes = w.at(1);
      options.weights.moments = w.at(2);
    } else {
      options.weights.measures = w.value("measures", defaults.measures);
      options.weights.indexes = w.value("indexes", defaults.indexes);
      options.weights.moments = w.value("moments", defaults.moments);
    }
  }
  options.use_classifier = body.value("use_classifier", true);
  options.use_ontology = body.value("use_ontology", true);
  if (body.contains("patterns")) {
    std::vector<Pattern> patterns;
    for (const auto& p : body.at("patterns")) {
      if (p.is_string()) {
        patterns.push_back(parse_pattern(p.get<std::string>()));
      } else {
        patterns.push_back({p.at(0), p.at(1), p.at(2)});
      }
    }
    options.patterns = std::move(patterns);
  }
  return options;
}

std::string query_response(const RetrievalIndex& index, const std::string& model_id,
                           const QueryOptions& options) {
  return dump_json(results_to_json(model_id, retrieve(index, model_id, options))) + "\n";
}

std::string pr_csv(const EvalResult& result) {
  std::string out = "recall,precision\n";
  char buf[64];
  for (std::size_t i = 0; i < result.mean_precision.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.1f,%.17g\n", static_cast<double>(i) / 10.0,
                  result.mean_precision[i]);
    out += buf;
  }
  return out;
}

std::map<std::string, std::set<std::string>> index_ground_truth(const RetrievalIndex& index) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& m : index.models) {
    if (!m.record.class_name.empty()) out[m.record.class_name].insert(m.record.id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(dump_json({{"error", message}}) + "\n", kJson);
}

int status_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::UnknownModel: return 404;
    case ErrorCode::EmptyIndex: return 503;
    default: return 400;
  }
}

json label_summary(const RetrievalIndex& index, const IndexedModel& m) {
  json out = json::object();
  for (const auto& vocab : index.vocabularies) {
    const auto it = m.label.find(vocab.category);
    if (it != m.label.end()) out[vocab.category] = vocab.labels.at(static_cast<std::size_t>(it->second));
  }
  return out;
}

template <typename Handler>
void guarded(httplib::Response& res, Handler&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    send_error(res, status_for(e), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

Service::Service(RetrievalIndex index) : index_(std::move(index)), server_(std::make_unique<httplib::Server>()) {
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  register_routes();
}

Service::~Service() { stop(); }

void Service::register_routes() {
  auto& s = *server_;

  s.Get("/api/models", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& m : index_.models) {
      out.push_back({{"id", m.record.id},
                     {"class", m.record.class_name},
                     {"predicted_class", m.predicted_class},
                     {"label", label_summary(index_, m)}});
    }
    res.set_content(dump_json(out) + "\n", kJson);
  });

  s.Get(R"(/api/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& m = index_.model(req.matches[1].str());
      json facts = json::array();
      const std::string prefix = m.record.id + "/";
      for (const auto& f : index_.facts.facts()) {
        if (f.subject == m.record.id || f.subject.rfind(prefix, 0) == 0) {
          facts.push_back({f.subject, f.predicate, f.object});
        }
      }
      json concepts = json::object();
      for (const auto& [cat, id] : m.label) concepts[cat] = id;
      const json out = {{"id", m.record.id},
                        {"path", m.record.path},
                        {"class", m.record.class_name},
                        {"predicted_class", m.predicted_class},
                        {"concepts", concepts},
                        {"label", label_summary(index_, m)},
                        {"descriptor", descriptor_to_json(m.record.descriptor)},
                        {"facts", facts}};
      res.set_content(dump_json(out) + "\n", kJson);
    });
  });

  s.Get(R"(/api/models/([^/]+)/mesh)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& m = index_.model(req.matches[1].str());
      res.set_content(read_text(index_.corpus_dir + "/" + m.record.path), "text/plain");
    });
  });

  s.Get("/api/classes", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::object();
    for (const auto& [cls, members] : index_ground_truth(index_)) {
      out[cls]["members"] = json(std::vector<std::string>(members.begin(), members.end()));
    }
    std::map<std::string, std::vector<std::string>> predicted;
    for (const auto& m : index_.models) predicted[m.predicted_class].push_back(m.record.id);
    for (const auto& [cls, members] : predicted) out[cls]["predicted_members"] = members;
    res.set_content(dump_json(out) + "\n", kJson);
  });

  s.Post("/api/query", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body);
      if (!body.contains("model_id")) throw Error(ErrorCode::InvalidArgument, "model_id is required");
      const auto options = query_options_from_json(body);
      res.set_content(query_response(index_, body.at("model_id").get<std::string>(), options), kJson);
    });
  });

  s.Get("/api/eval/pr", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string cls = req.get_param_value("class");
      const auto truth = index_ground_truth(index_);
      if (cls.empty() || !truth.count(cls)) {
        throw Error(ErrorCode::UnknownModel, "unknown class '" + cls + "'");
      }
      res.set_content(pr_csv(evaluate(index_, QueryOptions{}, truth, cls)), "text/csv");
    });
  });
}

void Service::listen(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::PortInUse, host + ":" + std::to_string(port));
  }
  server_->listen_after_bind();
}

int Service::bind_any(const std::string& host) {
  const int port = server_->bind_to_any_port(host);
  if (port < 0) throw Error(ErrorCode::PortInUse, host + ": no free port");
  return port;
}

void Service::run() { server_->listen_after_bind(); }

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace shape3d
