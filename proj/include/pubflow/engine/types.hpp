#pragma once

#include "pubflow/common/codec.hpp"
#include "pubflow/procdef/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pubflow::engine {

// A process variable. Bytes stands in for arbitrary serialized objects.
class TypedValue {
public:
    using Storage = std::variant<std::string, std::int64_t, double, bool, Bytes>;

    TypedValue() : v_(std::string()) {}
    TypedValue(std::string s) : v_(std::move(s)) {}
    TypedValue(const char* s) : v_(std::string(s)) {}
    TypedValue(std::int64_t i) : v_(i) {}
    TypedValue(int i) : v_(static_cast<std::int64_t>(i)) {}
    TypedValue(double d) : v_(d) {}
    TypedValue(bool b) : v_(b) {}
    TypedValue(Bytes b) : v_(std::move(b)) {}

    const Storage& get() const { return v_; }
    std::string_view type_name() const;
    // The string form used by decision rules and log templates.
    std::string render() const;

    // {"type": "string|integer|float|boolean|bytes", "value": ...}; bytes
    // travel as base64. Throws Error{BAD_REQUEST} on malformed input.
    nlohmann::json to_json() const;
    static TypedValue from_json(const nlohmann::json& j);

    bool operator==(const TypedValue&) const = default;

private:
    Storage v_;
};

using Variables = std::map<std::string, TypedValue>;

struct DeploymentRecord {
    std::string definition_id;
    std::string name;
    int version = 0;
    Timestamp deployed_at{};
    procdef::ProcessDefinition definition;
    std::optional<procdef::LayoutMetadata> layout;
    std::optional<Bytes> image;
};

enum class InstanceState { running, ended, stopped };
enum class TaskState { open, completed };

std::string_view to_string(InstanceState s);
std::string_view to_string(TaskState s);

struct Token {
    std::string token_id;
    std::string node;
    std::optional<std::string> parent;
    bool alive = true;
    bool operator==(const Token&) const = default;
};

struct TaskInstance {
    std::string task_instance_id;
    std::string instance_id;
    std::string token_id;
    std::string node_name;
    std::string task_name;
    std::string actor_id;
    TaskState state = TaskState::open;
    std::uint64_t ordinal = 0;  // global creation order, for newest-first listing
    Timestamp created_at{};
    std::optional<Timestamp> completed_at;
    bool operator==(const TaskInstance&) const = default;
};

struct ProcessInstance {
    std::string instance_id;
    std::string definition_id;
    InstanceState state = InstanceState::running;
    std::string initiator;
    std::map<std::string, std::string> swimlane_bindings;
    Variables variables;
    std::vector<Token> tokens;
    std::vector<TaskInstance> tasks;
    std::vector<std::string> trail;  // every node entered, in order
    std::uint64_t next_serial = 1;   // for token and task ids
    Timestamp created_at{};
    std::optional<Timestamp> ended_at;
    bool operator==(const ProcessInstance&) const = default;

    const Token* root() const { return tokens.empty() ? nullptr : &tokens.front(); }
    std::vector<const TaskInstance*> open_tasks() const;
};

struct GraphNode {
    std::string name;
    procdef::NodeKind kind;
    procdef::Geometry geometry;
};

struct GraphTransition {
    std::string from;
    std::string to;
    std::optional<std::string> name;
};

struct GraphState {
    std::string definition_id;
    std::vector<GraphNode> nodes;
    std::vector<GraphTransition> transitions;
    std::vector<std::string> current_nodes;
};

enum class AdminAction { advance, stop };
std::optional<AdminAction> admin_action_from(std::string_view s);

// Who is asking: the authenticated actor and whether it holds the admin role.
struct Caller {
    std::string actor_id;
    bool admin = false;
};

nlohmann::json to_json(const Token& t);
nlohmann::json to_json(const TaskInstance& t);
nlohmann::json to_json(const ProcessInstance& p);
nlohmann::json to_json(const GraphState& g);
// Summary without the definition body.
nlohmann::json summary_json(const DeploymentRecord& d);
// Full record, definition and layout as XML text, image base64.
nlohmann::json to_json(const DeploymentRecord& d);

TaskInstance task_from_json(const nlohmann::json& j);
ProcessInstance instance_from_json(const nlohmann::json& j);
DeploymentRecord deployment_from_json(const nlohmann::json& j);

} // namespace pubflow::engine
