// shape3d: index a mesh corpus, query it, evaluate it and serve it over HTTP.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "shape3d/cla.hpp"
#include "shape3d/error.hpp"
#include "shape3d/json_io.hpp"
#include "shape3d/service.hpp"

using namespace shape3d;

namespace {

WeightProfile parse_weights(const std::string& text) {
  WeightProfile w;
  double m = 0, i = 0, o = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &m, &i, &o, &tail) != 3) {
    throw Error(ErrorCode::InvalidArgument, "--weights expects m,i,o");
  }
  w.measures = m;
  w.indexes = i;
  w.moments = o;
  return w;
}

std::string index_path(const std::string& flag) {
  if (const char* env = std::getenv("SHAPE3D_INDEX"); env && *env) return env;
  if (flag.empty()) throw Error(ErrorCode::InvalidArgument, "--index (or SHAPE3D_INDEX) is required");
  return flag;
}

// PSB .cla files list bare numbers; corpus files are usually m<id>.off.
std::map<std::string, std::set<std::string>> ground_truth(const RetrievalIndex& index,
                                                          const ClassMap& classes, bool rollup) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [name, info] : classes.classes) {
    for (const auto& id : classes.members(name, rollup)) {
      if (index.position.count(id)) {
        out[name].insert(id);
      } else if (index.position.count("m" + id)) {
        out[name].insert("m" + id);
      }
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D model classification and retrieval"};
  app.require_subcommand(1);

  Config config;
  std::string index_flag, weights_text, model_path, model_id, cla_path, out_path;
  std::vector<std::string> patterns;
  std::size_t k = 12;
  bool no_classify = false, no_ontology = false, as_json = false, rollup = false, serial = false;

  auto* index_cmd = app.add_subcommand("index", "Build an index from a directory of OFF files");
  index_cmd->add_option("--corpus", config.corpus_dir, "Corpus directory")->required();
  index_cmd->add_option("--out", config.index_path, "Index file to write")->required();
  index_cmd->add_option("--clusters", config.clusters, "Concept levels per index")->check(CLI::PositiveNumber);
  index_cmd->add_option("--knn", config.knn_k, "Neighbours for k-NN")->check(CLI::PositiveNumber);
  index_cmd->add_option("--seed", config.seed, "k-means seed");
  index_cmd->add_option("--epsilon", config.epsilon_rel, "Relative spatial-relation threshold");
  index_cmd->add_option("--cla", config.cla_path, "PSB class file");
  index_cmd->add_flag("--serial", serial, "Disable OpenMP extraction");

  auto* query_cmd = app.add_subcommand("query", "Retrieve the models most similar to a query");
  query_cmd->add_option("--index", index_flag, "Index file");
  auto* by_path = query_cmd->add_option("--model", model_path, "Query mesh (OFF)");
  auto* by_id = query_cmd->add_option("--id", model_id, "Indexed model id");
  by_path->excludes(by_id);
  query_cmd->add_option("--k", k, "Result count")->check(CLI::PositiveNumber);
  query_cmd->add_option("--weights", weights_text, "Group weights m,i,o");
  query_cmd->add_option("--pattern", patterns, "Ontology pattern 's p o' (repeatable)");
  query_cmd->add_flag("--no-classify", no_classify, "Skip the k-NN class stage");
  query_cmd->add_flag("--no-ontology", no_ontology, "Skip the fact-store filter");
  query_cmd->add_flag("--json", as_json, "Print JSON");

  auto* eval_cmd = app.add_subcommand("eval", "Precision-recall over a labelled corpus");
  eval_cmd->add_option("--index", index_flag, "Index file");
  eval_cmd->add_option("--cla", cla_path, "PSB class file")->required();
  eval_cmd->add_option("--out", out_path, "CSV output (stdout if omitted)");
  eval_cmd->add_flag("--rollup", rollup, "Include child classes in parent classes");

  auto* export_cmd = app.add_subcommand("export-facts", "Write the fact store as text triples");
  export_cmd->add_option("--index", index_flag, "Index file");
  export_cmd->add_option("--out", out_path, "Output file")->required();

  auto* serve_cmd = app.add_subcommand("serve", "Serve the index over HTTP");
  serve_cmd->add_option("--index", index_flag, "Index file");
  serve_cmd->add_option("--port", config.port, "TCP port")->check(CLI::Range(0, 65535));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*index_cmd) {
      config.parallel = !serial;
      const auto report = build_index(config);
      std::cerr << "indexed " << report.indexed << " models (" << report.skipped << " skipped), "
                << "mean " << report.mean_seconds << " s/model, max " << report.max_seconds << " s\n";
    } else if (*query_cmd) {
      const auto index = read_index(index_path(index_flag));
      QueryOptions options;
      options.k = k;
      options.use_classifier = !no_classify;
      options.use_ontology = !no_ontology;
      if (!weights_text.empty()) options.weights = parse_weights(weights_text);
      if (!patterns.empty()) {
        options.patterns.emplace();
        for (const auto& p : patterns) options.patterns->push_back(parse_pattern(p));
      }
      if (model_id.empty() && model_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "one of --id or --model is required");
      }
      const std::string label = model_id.empty() ? model_path : model_id;
      const auto results = model_id.empty() ? retrieve(index, read_off_file(model_path), options)
                                            : retrieve(index, model_id, options);
      if (as_json) {
        std::cout << dump_json(results_to_json(label, results)) << "\n";
      } else {
        std::printf("%-5s %-24s %-14s %-20s %s\n", "rank", "id", "distance", "class", "filter");
        for (std::size_t i = 0; i < results.size(); ++i) {
          const auto& r = results[i];
          std::printf("%-5zu %-24s %-14.6g %-20s %s\n", i + 1, r.model_id.c_str(), r.distance,
                      r.predicted_class.c_str(), r.passed_filter ? "pass" : "backfill");
        }
      }
    } else if (*eval_cmd) {
      const auto index = read_index(index_path(index_flag));
      const auto truth = ground_truth(index, read_cla_file(cla_path), rollup);
      const auto result = evaluate(index, QueryOptions{}, truth);
      const std::string csv = pr_csv(result);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(out_path) << csv;
      }
      std::cerr << "evaluated " << result.queries << " queries\n";
    } else if (*export_cmd) {
      const auto index = read_index(index_path(index_flag));
      std::ofstream out(out_path);
      if (!(out << index.facts.export_text())) throw Error(ErrorCode::WriteFailure, out_path);
    } else if (*serve_cmd) {
      Service service(read_index(index_path(index_flag)));
      std::cerr << "serving on port " << config.port << "\n";
      service.listen("0.0.0.0", config.port);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
