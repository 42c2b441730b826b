#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include <doctest.h>

#include "shape3d/error.hpp"
#include "shape3d/primitives.hpp"
#include "shape3d/service.hpp"
#include "temp_dir.hpp"

// After Eigen: <resolv.h> defines _res.
#include <httplib.h>

using namespace shape3d;
using nlohmann::json;
using test_support::TempDir;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Twenty primitives in two classes, spread over two sub-directories, plus a .cla file.
void write_corpus(const std::filesystem::path& dir) {
  std::mt19937_64 rng(77);
  std::string cla = "PSB 1\n2 20\nround 0 10\n";
  for (int i = 0; i < 10; ++i) {
    const auto mesh = primitives::perturbed(primitives::icosphere(2), 0.03, rng);
    write_file(dir / "round" / ("m" + std::to_string(100 + i) + ".off"), serialize_off(mesh));
    cla += std::to_string(100 + i) + "\n";
  }
  cla += "long 0 10\n";
  for (int i = 0; i < 10; ++i) {
    const auto mesh = primitives::perturbed(primitives::box(4, 1.2, 1, 2), 0.03, rng);
    write_file(dir / "long" / ("m" + std::to_string(200 + i) + ".off"), serialize_off(mesh));
    cla += std::to_string(200 + i) + "\n";
  }
  write_file(dir / "classes.cla", cla);
}

std::string run_cli(const std::string& args, int* status = nullptr) {
  const std::string command = std::string(SHAPE3D_CLI) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(command.c_str(), "r"), pclose);
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf;
  for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0;) out.append(buf.data(), n);
  const int rc = pclose(pipe.release());
  if (status) *status = rc;
  return out;
}

struct Fixture {
  TempDir dir{"shape3d-service"};
  Config config;
  RetrievalIndex index;

  Fixture() {
    write_corpus(dir.path() / "corpus");
    config.corpus_dir = (dir.path() / "corpus").string();
    config.index_path = (dir.path() / "index.json").string();
    config.cla_path = (dir.path() / "corpus" / "classes.cla").string();
    build_index(config, &index);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

// Runs a Service on an ephemeral port for the lifetime of the object.
class RunningService {
 public:
  explicit RunningService(RetrievalIndex index) : service_(std::move(index)) {
    port_ = service_.bind_any("127.0.0.1");
    thread_ = std::thread([this] { service_.run(); });
    service_.wait_until_ready();
  }
  ~RunningService() {
    service_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  Service service_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("build_index over a directory") {
  auto& f = fixture();
  CHECK(f.index.models.size() == 20);
  CHECK(f.index.skipped.empty());
  CHECK(f.index.model("m105").record.class_name == "round");
  CHECK(f.index.model("m203").record.path == "long/m203.off");
  CHECK(std::filesystem::exists(f.config.index_path));
  const std::string timing = read_file(f.config.index_path + ".timing.csv");
  CHECK(timing.rfind("id,vertices,faces,seconds\n", 0) == 0);
  CHECK(std::count(timing.begin(), timing.end(), '\n') == 21);
}

TEST_CASE("index files round-trip") {
  auto& f = fixture();
  const auto loaded = read_index(f.config.index_path);
  CHECK(dump_json(to_json(loaded)) == dump_json(to_json(f.index)));
  CHECK(loaded.facts.export_text() == f.index.facts.export_text());
  const auto doc = json::parse(read_file(f.config.index_path));
  CHECK(doc.at("schema_version") == kIndexSchemaVersion);
  for (const auto& m : f.index.models) {
    const auto a = retrieve(f.index, m.record.id, QueryOptions{});
    const auto b = retrieve(loaded, m.record.id, QueryOptions{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].model_id == b[i].model_id);
      CHECK(a[i].distance == b[i].distance);
      CHECK(a[i].passed_filter == b[i].passed_filter);
    }
  }
  // Loading and writing again reproduces the file.
  TempDir other("shape3d-rewrite");
  write_index(loaded, (other.path() / "again.json").string());
  CHECK(read_file(other.path() / "again.json") == read_file(f.config.index_path));
}

TEST_CASE("rebuilding gives identical bytes") {
  auto& f = fixture();
  TempDir other("shape3d-rebuild");
  Config again = f.config;
  again.index_path = (other.path() / "index.json").string();
  again.parallel = false;
  build_index(again);
  CHECK(read_file(again.index_path) == read_file(f.config.index_path));
}

TEST_CASE("build_index errors and skips") {
  TempDir empty("shape3d-empty");
  Config config;
  config.corpus_dir = empty.str();
  config.index_path = (empty.path() / "i.json").string();
  try {
    build_index(config);
    FAIL("expected NoModelsFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoModelsFound);
  }

  TempDir corpus("shape3d-corrupt");
  for (int i = 0; i < 4; ++i) {
    write_file(corpus.path() / ("b" + std::to_string(i) + ".off"),
               serialize_off(primitives::box(1 + i, 1, 0.5, 1)));
  }
  write_file(corpus.path() / "bad.off", "OFF\n8 12 0\n0 0 0\n");
  config.corpus_dir = corpus.str();
  config.index_path = (corpus.path() / "i.json").string();
  RetrievalIndex index;
  const auto report = build_index(config, &index);
  CHECK(report.indexed == 4);
  CHECK(report.skipped == 1);
  REQUIRE(index.skipped.size() == 1);
  CHECK(index.skipped[0].path == "bad.off");
  CHECK(read_index(config.index_path).skipped.size() == 1);

  Config bad = config;
  bad.epsilon_rel = 0.7;
  CHECK_THROWS_AS(build_index(bad), Error);
  bad = config;
  bad.clusters = 0;
  CHECK_THROWS_AS(build_index(bad), Error);
}

TEST_CASE("query options from JSON") {
  const auto o = query_options_from_json(json::parse(
      R"({"k": 3, "weights": [1, 0.5, 2], "use_classifier": false, "patterns": ["?m sphericity 0"]})"));
  CHECK(o.k == 3);
  CHECK(o.weights.indexes == 0.5);
  CHECK_FALSE(o.use_classifier);
  CHECK(o.use_ontology);
  REQUIRE(o.patterns.has_value());
  CHECK(o.patterns->at(0).predicate == "sphericity");
  const auto named = query_options_from_json(json::parse(R"({"weights": {"moments": 0}})"));
  CHECK(named.weights.moments == 0.0);
  CHECK(named.weights.measures == 1.0);
  CHECK_THROWS(query_options_from_json(json::parse(R"({"k": 0})")));
}

TEST_CASE("HTTP endpoints") {
  auto& f = fixture();
  RunningService running(f.index);
  auto client = running.client();

  auto models = client.Get("/api/models");
  REQUIRE(models);
  CHECK(models->status == 200);
  const auto list = json::parse(models->body);
  CHECK(list.size() == 20);
  CHECK(list[0].contains("label"));
  CHECK(list[0].at("class") == "round");

  auto one = client.Get("/api/models/m101");
  REQUIRE(one);
  CHECK(one->status == 200);
  const auto detail = json::parse(one->body);
  CHECK(detail.at("id") == "m101");
  CHECK(detail.at("facts").size() > 0);
  CHECK(detail.at("concepts").size() == 7);

  auto mesh = client.Get("/api/models/m101/mesh");
  REQUIRE(mesh);
  CHECK(mesh->status == 200);
  CHECK(mesh->body == read_file(std::filesystem::path(f.config.corpus_dir) / "round" / "m101.off"));
  CHECK(parse_off(mesh->body).vertices.size() == primitives::icosphere(2).vertices.size());

  auto missing = client.Get("/api/models/nope/mesh");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body).contains("error"));
  CHECK(client.Get("/api/models/nope")->status == 404);

  auto classes = client.Get("/api/classes");
  REQUIRE(classes);
  const auto cls = json::parse(classes->body);
  CHECK(cls.at("round").at("members").size() == 10);

  auto query = client.Post("/api/query", R"({"model_id": "m104", "k": 12})", "application/json");
  REQUIRE(query);
  CHECK(query->status == 200);
  const auto results = json::parse(query->body);
  CHECK(results.at("results").size() == 12);
  CHECK(results.at("results")[0].at("id") == "m104");

  auto bad = client.Post("/api/query", R"({"k": 12})", "application/json");
  CHECK(bad->status == 400);
  auto unknown = client.Post("/api/query", R"({"model_id": "zzz"})", "application/json");
  CHECK(unknown->status == 404);
  auto garbage = client.Post("/api/query", "{not json", "application/json");
  CHECK(garbage->status == 400);

  auto pr = client.Get("/api/eval/pr?class=round");
  REQUIRE(pr);
  CHECK(pr->status == 200);
  CHECK(pr->body.rfind("recall,precision\n0.0,", 0) == 0);
  CHECK(std::count(pr->body.begin(), pr->body.end(), '\n') == 12);
  CHECK(client.Get("/api/eval/pr?class=none")->status == 404);
}

TEST_CASE("concurrent HTTP queries agree") {
  auto& f = fixture();
  RunningService running(f.index);
  const std::string expected = query_response(f.index, "m207", QueryOptions{});
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&] {
      auto client = running.client();
      for (int i = 0; i < 5; ++i) {
        auto res = client.Post("/api/query", R"({"model_id": "m207"})", "application/json");
        if (!res || res->body != expected) ++mismatches;
      }
    });
  }
  for (auto& w : workers) w.join();
  CHECK(mismatches == 0);
}

TEST_CASE("CLI and HTTP return identical query JSON") {
  auto& f = fixture();
  RunningService running(f.index);
  auto client = running.client();
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"--id m103 --k 12 --json", R"({"model_id": "m103", "k": 12})"},
      {"--id m208 --k 5 --weights 1,2,0.5 --json",
       R"({"model_id": "m208", "k": 5, "weights": [1, 2, 0.5]})"},
      {"--id m100 --k 20 --no-classify --no-ontology --json",
       R"({"model_id": "m100", "k": 20, "use_classifier": false, "use_ontology": false})"},
      {"--id m201 --pattern '?m elongation 0' --json",
       R"({"model_id": "m201", "patterns": ["?m elongation 0"]})"},
  };
  for (const auto& [args, body] : cases) {
    int status = -1;
    const std::string cli = run_cli("query --index " + f.config.index_path + " " + args, &status);
    CHECK(status == 0);
    auto res = client.Post("/api/query", body, "application/json");
    REQUIRE(res);
    CHECK(res->body == cli);
    CHECK_FALSE(cli.empty());
  }
}

TEST_CASE("CLI subcommands") {
  auto& f = fixture();
  TempDir out("shape3d-cli");
  int status = -1;
  run_cli("index --corpus " + f.config.corpus_dir + " --out " + (out.path() / "i.json").string() +
              " --cla " + f.config.cla_path,
          &status);
  CHECK(status == 0);
  CHECK(read_file(out.path() / "i.json") == read_file(f.config.index_path));

  const std::string table = run_cli("query --index " + f.config.index_path + " --id m102 --k 3", &status);
  CHECK(status == 0);
  CHECK(table.find("m102") != std::string::npos);

  const std::string by_mesh = run_cli("query --index " + f.config.index_path + " --model " +
                                      f.config.corpus_dir + "/round/m102.off --k 1 --json");
  CHECK(json::parse(by_mesh).at("results")[0].at("id") == "m102");

  const std::string csv = run_cli("eval --index " + f.config.index_path + " --cla " + f.config.cla_path, &status);
  CHECK(status == 0);
  CHECK(csv.rfind("recall,precision\n", 0) == 0);

  run_cli("export-facts --index " + f.config.index_path + " --out " + (out.path() / "facts.txt").string(), &status);
  CHECK(status == 0);
  CHECK(read_file(out.path() / "facts.txt") == f.index.facts.export_text());

  const std::string env = run_cli("query --id m102 --k 1 --json");
  CHECK(env.empty());
  const std::string with_env = run_cli("query --id m102 --k 1 --json --index /nonexistent");
  CHECK(with_env.empty());
  const std::string overridden =
      run_cli("query --index /nonexistent --id m102 --k 1 --json", &status);
  CHECK(status != 0);
  setenv("SHAPE3D_INDEX", f.config.index_path.c_str(), 1);
  const std::string env_ok = run_cli("query --index /nonexistent --id m102 --k 1 --json", &status);
  unsetenv("SHAPE3D_INDEX");
  CHECK(status == 0);
  CHECK(json::parse(env_ok).at("results")[0].at("id") == "m102");

  run_cli("query --index " + f.config.index_path + " --id nope", &status);
  CHECK(status != 0);
}

TEST_CASE("port already in use") {
  auto& f = fixture();
  httplib::Server blocker;
  const int port = blocker.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  Service service(f.index);
  try {
    service.listen("127.0.0.1", port);
    FAIL("expected PortInUse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PortInUse);
  }
}
