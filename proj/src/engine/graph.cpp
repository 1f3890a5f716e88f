#include "pubflow/engine/graph.hpp"

#include <algorithm>
#include <deque>

namespace pubflow::engine {

namespace {

constexpr int kMargin = 40;
constexpr int kColumnStep = 180;
constexpr int kRowStep = 90;
constexpr int kWidth = 140;
constexpr int kHeight = 50;

} // namespace

std::map<std::string, procdef::Geometry> place_nodes(const procdef::ProcessDefinition& def,
                                                     const std::optional<procdef::LayoutMetadata>& layout) {
    std::map<std::string, int> level;
    if (const auto* start = def.start_node()) {
        std::deque<std::string> queue{start->name};
        level[start->name] = 0;
        while (!queue.empty()) {
            auto n = queue.front();
            queue.pop_front();
            for (const auto* t : def.outgoing(n)) {
                if (!level.count(t->to) && def.find_node(t->to)) {
                    level[t->to] = level[n] + 1;
                    queue.push_back(t->to);
                }
            }
        }
    }
    int deepest = 0;
    for (const auto& [n, l] : level) deepest = std::max(deepest, l);

    std::map<std::string, procdef::Geometry> out;
    std::map<int, int> rows;
    for (const auto& node : def.nodes) {
        if (layout) {
            if (auto it = layout->per_node.find(node.name); it != layout->per_node.end()) {
                out[node.name] = it->second;
                continue;
            }
        }
        int column = level.count(node.name) ? level[node.name] : deepest + 1;
        int row = rows[column]++;
        out[node.name] = {kMargin + column * kColumnStep, kMargin + row * kRowStep, kWidth, kHeight};
    }
    return out;
}

GraphState build_graph_state(const DeploymentRecord& deployment, const ProcessInstance& instance) {
    GraphState g;
    g.definition_id = deployment.definition_id;
    auto geometry = place_nodes(deployment.definition, deployment.layout);
    for (const auto& n : deployment.definition.nodes) g.nodes.push_back({n.name, n.kind, geometry[n.name]});
    for (const auto& t : deployment.definition.transitions) g.transitions.push_back({t.from, t.to, t.name});
    for (const auto& tok : instance.tokens) {
        if (tok.alive && std::find(g.current_nodes.begin(), g.current_nodes.end(), tok.node) == g.current_nodes.end()) {
            g.current_nodes.push_back(tok.node);
        }
    }
    return g;
}

} // namespace pubflow::engine
