#pragma once

#include "dsg/json_util.hpp"
#include "dsg/scene_graph.hpp"

#include <string>
#include <string_view>

namespace dsg {

inline constexpr int kGraphFormatVersion = 1;

/// JSON document {version, nodes, edges, mesh}.
Json graph_to_json(const SceneGraph& graph);
SceneGraph graph_from_json(const Json& doc);

std::string serialize(const SceneGraph& graph);
/// Throws ParseError on malformed text, missing fields or a version mismatch.
SceneGraph deserialize(std::string_view bytes);

}  // namespace dsg
