#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace shape3d {

/// Princeton Shape Benchmark class file ("PSB 1").
struct ClassInfo {
  std::string parent;  // "0" for top-level classes
  std::vector<std::string> models;
};

struct ClassMap {
  std::map<std::string, ClassInfo> classes;

  /// Models of `name` and every descendant class.
  std::set<std::string> members(const std::string& name, bool rollup = false) const;
  /// Model id -> base class name.
  std::map<std::string, std::string> model_classes() const;
};

ClassMap parse_cla(std::string_view text);
ClassMap read_cla_file(const std::string& path);

}  // namespace shape3d
