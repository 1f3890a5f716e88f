#pragma once

#include "pubflow/engine/types.hpp"

namespace pubflow::engine {

// Geometry for every node: stored layout where present, otherwise layered
// left-to-right placement by breadth-first distance from the start node.
std::map<std::string, procdef::Geometry> place_nodes(const procdef::ProcessDefinition& def,
                                                     const std::optional<procdef::LayoutMetadata>& layout);

GraphState build_graph_state(const DeploymentRecord& deployment, const ProcessInstance& instance);

} // namespace pubflow::engine
