#pragma once
// Graph serialization: versioned JSON (lossless, round-trips) and Graphviz DOT.

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "taigr/core/graph.hpp"

namespace taigr {

enum class GraphFormat { Json, Dot };

inline constexpr int kGraphSchemaVersion = 1;

// Serializes a valid graph. JSON output has sorted node/edge order so that
// diffs stay stable. Throws std::invalid_argument on an unsupported format tag.
std::string serialize_graph(const ArgGraph& graph, GraphFormat format);

nlohmann::json graph_to_json(const ArgGraph& graph);
ArgGraph graph_from_json(const nlohmann::json& j);

// Parses the JSON produced by serialize_graph. Throws taigr::ParseError on
// malformed input or unsupported schema_version.
ArgGraph deserialize_graph(const std::string& bytes);

// Payload-level converters shared by the graph schema and the per-stage files.
nlohmann::json takeaway_to_json(const Takeaway& t);
Takeaway takeaway_from_json(const nlohmann::json& j);
nlohmann::json statement_to_json(const Statement& s);
Statement statement_from_json(const nlohmann::json& j);
nlohmann::json claim_to_json(const Claim& c);
Claim claim_from_json(const nlohmann::json& j);

}  // namespace taigr
