#include "shape3d/cla.hpp"

#include <fstream>
#include <sstream>

#include "shape3d/error.hpp"

namespace shape3d {
namespace {

std::vector<std::vector<std::string>> content_lines(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  return lines;
}

long long to_count(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedHeader, std::string("bad ") + what + " '" + s + "'");
  }
}

}  // namespace

ClassMap parse_cla(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.empty() || lines[0].size() != 2 || lines[0][0] != "PSB" || lines[0][1] != "1") {
    throw Error(ErrorCode::MalformedHeader, "expected 'PSB 1'");
  }
  if (lines.size() < 2 || lines[1].size() != 2) {
    throw Error(ErrorCode::MalformedHeader, "expected 'numClasses numModels'");
  }
  const long long num_classes = to_count(lines[1][0], "class count");
  const long long num_models = to_count(lines[1][1], "model count");

  ClassMap map;
  long long models = 0;
  std::size_t i = 2;
  while (i < lines.size()) {
    const auto& head = lines[i++];
    if (head.size() != 3) throw Error(ErrorCode::MalformedHeader, "class line needs 'name parent count'");
    const long long count = to_count(head[2], "member count");
    ClassInfo info;
    info.parent = head[1];
    for (long long m = 0; m < count; ++m) {
      if (i >= lines.size()) {
        throw Error(ErrorCode::CountMismatch, "class '" + head[0] + "' is missing members");
      }
      info.models.push_back(lines[i++][0]);
    }
    models += count;
    if (!map.classes.emplace(head[0], std::move(info)).second) {
      throw Error(ErrorCode::CountMismatch, "class '" + head[0] + "' listed twice");
    }
  }
  if (static_cast<long long>(map.classes.size()) != num_classes || models != num_models) {
    throw Error(ErrorCode::CountMismatch,
                "declared " + std::to_string(num_classes) + " classes / " +
                    std::to_string(num_models) + " models, found " +
                    std::to_string(map.classes.size()) + " / " + std::to_string(models));
  }
  return map;
}

ClassMap read_cla_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedHeader, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_cla(buffer.str());
}

std::set<std::string> ClassMap::members(const std::string& name, bool rollup) const {
  std::set<std::string> out;
  const auto it = classes.find(name);
  if (it == classes.end()) return out;
  out.insert(it->second.models.begin(), it->second.models.end());
  if (!rollup) return out;
  for (const auto& [child, info] : classes) {
    if (child == name) continue;
    // Walk up the parent chain; PSB uses "0" for the root.
    std::string parent = info.parent;
    for (std::size_t depth = 0; depth < classes.size() && parent != "0"; ++depth) {
      if (parent == name) {
        out.insert(info.models.begin(), info.models.end());
        break;
      }
      const auto up = classes.find(parent);
      if (up == classes.end()) break;
      parent = up->second.parent;
    }
  }
  return out;
}

std::map<std::string, std::string> ClassMap::model_classes() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, info] : classes) {
    for (const auto& m : info.models) out[m] = name;
  }
  return out;
}

}  // namespace shape3d
