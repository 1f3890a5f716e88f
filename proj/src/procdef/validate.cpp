#include "pubflow/procdef/validate.hpp"

#include <map>

namespace pubflow::procdef {

nlohmann::json to_json(const std::vector<Violation>& violations) {
    auto out = nlohmann::json::array();
    for (const auto& v : violations) out.push_back({{"code", v.code}, {"subject", v.subject}, {"message", v.message}});
    return out;
}

std::string transition_label(const Transition& t) {
    return t.name ? t.from + "/" + *t.name : t.from + "->" + t.to;
}

std::vector<Violation> validate_definition(const ProcessDefinition& def, const std::set<std::string>& roles) {
    std::vector<Violation> out;
    auto add = [&](std::string code, std::string subject, std::string message) {
        out.push_back({std::move(code), std::move(subject), std::move(message)});
    };

    if (def.name.empty()) add("EMPTY_NAME", "", "process definition has no name");

    std::set<std::string> node_names;
    for (const auto& n : def.nodes) {
        if (n.name.empty()) add("EMPTY_NAME", "", "a node has an empty name");
        if (!node_names.insert(n.name).second) add("DUPLICATE_NODE", n.name, "node name '" + n.name + "' is used twice");
    }
    std::set<std::string> lane_names;
    for (const auto& s : def.swimlanes) {
        if (!lane_names.insert(s.name).second) {
            add("DUPLICATE_SWIMLANE", s.name, "swimlane name '" + s.name + "' is used twice");
        }
        switch (s.assignment.kind) {
        case AssignmentKind::initiator: break;
        case AssignmentKind::role:
            if (!roles.count(s.assignment.value)) {
                add("UNKNOWN_ROLE", s.name, "swimlane '" + s.name + "' names unknown role '" + s.assignment.value + "'");
            }
            break;
        case AssignmentKind::fixed_actor:
            if (s.assignment.value.empty()) add("EMPTY_ACTOR", s.name, "swimlane '" + s.name + "' has an empty actor");
            break;
        }
    }

    int starts = 0;
    for (const auto& n : def.nodes) {
        if (n.kind == NodeKind::start) ++starts;
    }
    if (starts == 0) add("NO_START", "", "definition has no start node");
    if (starts > 1) add("MULTIPLE_START", "", "definition has " + std::to_string(starts) + " start nodes");

    std::map<std::string, int> incoming;
    std::map<std::pair<std::string, std::string>, int> names_per_node;
    std::map<std::string, int> defaults_per_node;
    for (const auto& t : def.transitions) {
        auto label = transition_label(t);
        if (!def.find_node(t.from) || !def.find_node(t.to)) {
            add("DANGLING_TRANSITION", label, "transition " + label + " references a missing node");
        }
        ++incoming[t.to];
        if (t.name) {
            if (++names_per_node[{t.from, *t.name}] == 2) {
                add("DUPLICATE_TRANSITION", label, "node '" + t.from + "' has two transitions named '" + *t.name + "'");
            }
        } else if (++defaults_per_node[t.from] == 2) {
            add("MULTIPLE_DEFAULT_TRANSITIONS", t.from, "node '" + t.from + "' has more than one unnamed transition");
        }
    }

    for (const auto& n : def.nodes) {
        auto outgoing = def.outgoing(n.name);
        if (n.kind == NodeKind::start && incoming[n.name] > 0) {
            add("START_HAS_INCOMING", n.name, "start node '" + n.name + "' has incoming transitions");
        }
        if (n.kind == NodeKind::end && !outgoing.empty()) {
            add("END_HAS_OUTGOING", n.name, "end node '" + n.name + "' has outgoing transitions");
        }
        if (n.kind == NodeKind::join && outgoing.size() != 1) {
            add("JOIN_OUTGOING", n.name, "join '" + n.name + "' must have exactly one outgoing transition");
        }
        bool wants_task = n.kind == NodeKind::start || n.kind == NodeKind::task;
        if (wants_task && !n.task) add("MISSING_TASK", n.name, "node '" + n.name + "' requires a task");
        if (!wants_task && n.task) add("UNEXPECTED_TASK", n.name, "node '" + n.name + "' cannot carry a task");
        if (n.task && !def.find_swimlane(n.task->swimlane)) {
            add("UNKNOWN_SWIMLANE", n.name, "task of '" + n.name + "' uses unknown swimlane '" + n.task->swimlane + "'");
        }
        if (!n.rules.empty() && n.kind != NodeKind::decision) {
            add("RULES_ON_NON_DECISION", n.name, "only decision nodes carry rules, '" + n.name + "' is a " +
                                                     std::string(to_string(n.kind)));
        }
        for (const auto& r : n.rules) {
            if (!def.named_transition(n.name, r.transition)) {
                add("FOREIGN_RULE_TRANSITION", n.name,
                    "rule of '" + n.name + "' selects '" + r.transition + "', which is not one of its transitions");
            }
        }
    }
    return out;
}

} // namespace pubflow::procdef
