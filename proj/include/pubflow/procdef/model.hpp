#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pubflow::procdef {

inline constexpr std::string_view kNamespace = "urn:pubflow:procdef-1";
inline constexpr std::string_view kLayoutNamespace = "urn:pubflow:layout-1";

enum class NodeKind { start, task, decision, fork, join, end };
enum class FieldKind { text, textarea, file };
enum class EventType { node_enter, node_leave, transition_taken };
enum class AssignmentKind { initiator, role, fixed_actor };

std::string_view to_string(NodeKind k);
std::string_view to_string(FieldKind k);
std::string_view to_string(EventType e);
std::string_view to_string(AssignmentKind a);
std::optional<NodeKind> node_kind_from(std::string_view s);
std::optional<FieldKind> field_kind_from(std::string_view s);
std::optional<EventType> event_type_from(std::string_view s);

// Nodes that never hold a resting token: the engine passes through them
// within a single operation.
inline bool is_automatic(NodeKind k) {
    return k == NodeKind::decision || k == NodeKind::fork || k == NodeKind::join;
}

struct FormField {
    std::string name;
    std::string label;
    FieldKind kind = FieldKind::text;
    bool operator==(const FormField&) const = default;
};

struct TaskSpec {
    std::string task_name;
    std::string swimlane;
    std::vector<FormField> form_fields;
    bool operator==(const TaskSpec&) const = default;
};

struct SetVariable {
    std::string name;
    std::string value;
    bool operator==(const SetVariable&) const = default;
};

// ${name} placeholders are replaced by the variable's string rendering.
struct LogMessage {
    std::string message_template;
    bool operator==(const LogMessage&) const = default;
};

using Effect = std::variant<SetVariable, LogMessage>;

struct ActionBinding {
    EventType event = EventType::node_enter;
    Effect effect;
    bool operator==(const ActionBinding&) const = default;
};

// First rule whose variable renders equal to `equals` selects `transition`.
struct DecisionRule {
    std::string variable;
    std::string equals;
    std::string transition;
    bool operator==(const DecisionRule&) const = default;
};

struct Node {
    std::string name;
    NodeKind kind = NodeKind::task;
    std::optional<TaskSpec> task;
    std::vector<DecisionRule> rules;
    std::vector<ActionBinding> actions;
    bool operator==(const Node&) const = default;
};

struct Transition {
    std::optional<std::string> name;  // absent: the node's default transition
    std::string from;
    std::string to;
    std::vector<ActionBinding> actions;
    bool operator==(const Transition&) const = default;
};

struct Assignment {
    AssignmentKind kind = AssignmentKind::initiator;
    std::string value;  // role name or actor id; empty for initiator
    bool operator==(const Assignment&) const = default;
};

struct Swimlane {
    std::string name;
    Assignment assignment;
    bool operator==(const Swimlane&) const = default;
};

struct ProcessDefinition {
    std::string name;
    std::vector<Node> nodes;
    std::vector<Transition> transitions;
    std::vector<Swimlane> swimlanes;
    std::vector<std::string> variables;

    bool operator==(const ProcessDefinition&) const = default;

    const Node* find_node(std::string_view node_name) const;
    const Swimlane* find_swimlane(std::string_view swimlane_name) const;
    // Transitions leaving `node_name`, in declaration order.
    std::vector<const Transition*> outgoing(std::string_view node_name) const;
    const Transition* default_transition(std::string_view node_name) const;
    const Transition* named_transition(std::string_view node_name, std::string_view transition_name) const;
    const Node* start_node() const;
};

struct Geometry {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    bool operator==(const Geometry&) const = default;
};

struct LayoutMetadata {
    std::map<std::string, Geometry> per_node;
    bool operator==(const LayoutMetadata&) const = default;
};

} // namespace pubflow::procdef
