#include "pubflow/procdef/model.hpp"

#include <algorithm>

namespace pubflow::procdef {

std::string_view to_string(NodeKind k) {
    switch (k) {
    case NodeKind::start: return "start";
    case NodeKind::task: return "task";
    case NodeKind::decision: return "decision";
    case NodeKind::fork: return "fork";
    case NodeKind::join: return "join";
    case NodeKind::end: return "end";
    }
    return "?";
}

std::string_view to_string(FieldKind k) {
    switch (k) {
    case FieldKind::text: return "text";
    case FieldKind::textarea: return "textarea";
    case FieldKind::file: return "file";
    }
    return "?";
}

std::string_view to_string(EventType e) {
    switch (e) {
    case EventType::node_enter: return "node-enter";
    case EventType::node_leave: return "node-leave";
    case EventType::transition_taken: return "transition-taken";
    }
    return "?";
}

std::string_view to_string(AssignmentKind a) {
    switch (a) {
    case AssignmentKind::initiator: return "initiator";
    case AssignmentKind::role: return "role";
    case AssignmentKind::fixed_actor: return "actor";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from(std::string_view s) {
    for (auto k : {NodeKind::start, NodeKind::task, NodeKind::decision, NodeKind::fork, NodeKind::join, NodeKind::end}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::optional<FieldKind> field_kind_from(std::string_view s) {
    for (auto k : {FieldKind::text, FieldKind::textarea, FieldKind::file}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::optional<EventType> event_type_from(std::string_view s) {
    for (auto e : {EventType::node_enter, EventType::node_leave, EventType::transition_taken}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

const Node* ProcessDefinition::find_node(std::string_view node_name) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.name == node_name; });
    return it == nodes.end() ? nullptr : &*it;
}

const Swimlane* ProcessDefinition::find_swimlane(std::string_view swimlane_name) const {
    auto it = std::find_if(swimlanes.begin(), swimlanes.end(), [&](const Swimlane& s) { return s.name == swimlane_name; });
    return it == swimlanes.end() ? nullptr : &*it;
}

std::vector<const Transition*> ProcessDefinition::outgoing(std::string_view node_name) const {
    std::vector<const Transition*> out;
    for (const auto& t : transitions) {
        if (t.from == node_name) out.push_back(&t);
    }
    return out;
}

const Transition* ProcessDefinition::default_transition(std::string_view node_name) const {
    for (const auto& t : transitions) {
        if (t.from == node_name && !t.name) return &t;
    }
    return nullptr;
}

const Transition* ProcessDefinition::named_transition(std::string_view node_name, std::string_view transition_name) const {
    for (const auto& t : transitions) {
        if (t.from == node_name && t.name && *t.name == transition_name) return &t;
    }
    return nullptr;
}

const Node* ProcessDefinition::start_node() const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.kind == NodeKind::start; });
    return it == nodes.end() ? nullptr : &*it;
}

} // namespace pubflow::procdef
