#pragma once

#include <string>

#include <json.hpp>

#include "shape3d/retrieval.hpp"

namespace shape3d {

inline constexpr int kIndexSchemaVersion = 1;

/// Compact JSON with sorted keys and doubles printed as %.17g.
std::string dump_json(const nlohmann::json& value);

nlohmann::json to_json(const RetrievalIndex& index);
RetrievalIndex index_from_json(const nlohmann::json& doc);

void write_index(const RetrievalIndex& index, const std::string& path);
RetrievalIndex read_index(const std::string& path);

nlohmann::json results_to_json(std::string_view query_id, const std::vector<RankedResult>& results);
nlohmann::json descriptor_to_json(const DescriptorVector& d);

}  // namespace shape3d
