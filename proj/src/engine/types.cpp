#include "pubflow/engine/types.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/procdef/xml_format.hpp"

#include <cmath>
#include <cstdio>

namespace pubflow::engine {

using nlohmann::json;

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

[[noreturn]] void bad_value(const std::string& why) { throw Error(Errc::BAD_REQUEST, "invalid typed value: " + why); }

json optional_ts(const std::optional<Timestamp>& t) { return t ? json(format_iso8601(*t)) : json(nullptr); }

std::optional<Timestamp> read_optional_ts(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return parse_iso8601(j[key].get<std::string>());
}

} // namespace

std::string_view TypedValue::type_name() const {
    return std::visit(overloaded{[](const std::string&) { return std::string_view("string"); },
                                 [](std::int64_t) { return std::string_view("integer"); },
                                 [](double) { return std::string_view("float"); },
                                 [](bool) { return std::string_view("boolean"); },
                                 [](const Bytes&) { return std::string_view("bytes"); }},
                      v_);
}

std::string TypedValue::render() const {
    return std::visit(overloaded{[](const std::string& s) { return s; },
                                 [](std::int64_t i) { return std::to_string(i); },
                                 [](double d) {
                                     char buf[64];
                                     std::snprintf(buf, sizeof buf, "%.17g", d);
                                     return std::string(buf);
                                 },
                                 [](bool b) { return std::string(b ? "true" : "false"); },
                                 [](const Bytes& b) { return base64_encode(b); }},
                      v_);
}

json TypedValue::to_json() const {
    json value = std::visit(overloaded{[](const std::string& s) { return json(s); },
                                       [](std::int64_t i) { return json(i); },
                                       [](double d) { return json(d); },
                                       [](bool b) { return json(b); },
                                       [](const Bytes& b) { return json(base64_encode(b)); }},
                            v_);
    return {{"type", std::string(type_name())}, {"value", std::move(value)}};
}

TypedValue TypedValue::from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.contains("value") || !j["type"].is_string()) {
        bad_value("expected {\"type\", \"value\"}");
    }
    const auto& type = j["type"].get_ref<const std::string&>();
    const auto& v = j["value"];
    if (type == "string" && v.is_string()) return TypedValue(v.get<std::string>());
    if (type == "integer" && v.is_number_integer()) return TypedValue(v.get<std::int64_t>());
    if (type == "float" && v.is_number()) {
        double d = v.get<double>();
        if (!std::isfinite(d)) bad_value("float must be finite");
        return TypedValue(d);
    }
    if (type == "boolean" && v.is_boolean()) return TypedValue(v.get<bool>());
    if (type == "bytes" && v.is_string()) return TypedValue(base64_decode(v.get<std::string>()));
    bad_value("type '" + type + "' does not match value " + v.dump());
}

std::string_view to_string(InstanceState s) {
    switch (s) {
    case InstanceState::running: return "running";
    case InstanceState::ended: return "ended";
    case InstanceState::stopped: return "stopped";
    }
    return "?";
}

std::string_view to_string(TaskState s) { return s == TaskState::open ? "open" : "completed"; }

std::optional<AdminAction> admin_action_from(std::string_view s) {
    if (s == "advance") return AdminAction::advance;
    if (s == "stop") return AdminAction::stop;
    return std::nullopt;
}

std::vector<const TaskInstance*> ProcessInstance::open_tasks() const {
    std::vector<const TaskInstance*> out;
    for (const auto& t : tasks) {
        if (t.state == TaskState::open) out.push_back(&t);
    }
    return out;
}

json to_json(const Token& t) {
    return {{"tokenId", t.token_id},
            {"currentNode", t.node},
            {"parent", t.parent ? json(*t.parent) : json(nullptr)},
            {"alive", t.alive}};
}

json to_json(const TaskInstance& t) {
    return {{"taskInstanceId", t.task_instance_id},
            {"instanceId", t.instance_id},
            {"tokenId", t.token_id},
            {"nodeName", t.node_name},
            {"taskName", t.task_name},
            {"actorId", t.actor_id},
            {"state", std::string(to_string(t.state))},
            {"ordinal", t.ordinal},
            {"createdAt", format_iso8601(t.created_at)},
            {"completedAt", optional_ts(t.completed_at)}};
}

json to_json(const ProcessInstance& p) {
    json vars = json::object();
    for (const auto& [k, v] : p.variables) vars[k] = v.to_json();
    json tokens = json::array();
    for (const auto& t : p.tokens) tokens.push_back(to_json(t));
    json tasks = json::array();
    for (const auto& t : p.tasks) tasks.push_back(to_json(t));
    return {{"instanceId", p.instance_id},
            {"definitionId", p.definition_id},
            {"state", std::string(to_string(p.state))},
            {"initiator", p.initiator},
            {"swimlaneBindings", p.swimlane_bindings},
            {"variables", std::move(vars)},
            {"tokens", std::move(tokens)},
            {"tasks", std::move(tasks)},
            {"trail", p.trail},
            {"nextSerial", p.next_serial},
            {"createdAt", format_iso8601(p.created_at)},
            {"endedAt", optional_ts(p.ended_at)}};
}

json to_json(const GraphState& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) {
        nodes.push_back({{"name", n.name},
                         {"kind", std::string(procdef::to_string(n.kind))},
                         {"x", n.geometry.x},
                         {"y", n.geometry.y},
                         {"width", n.geometry.width},
                         {"height", n.geometry.height}});
    }
    json transitions = json::array();
    for (const auto& t : g.transitions) {
        transitions.push_back({{"from", t.from}, {"to", t.to}, {"name", t.name ? json(*t.name) : json(nullptr)}});
    }
    return {{"definitionId", g.definition_id},
            {"nodes", std::move(nodes)},
            {"transitions", std::move(transitions)},
            {"currentNodes", g.current_nodes}};
}

json summary_json(const DeploymentRecord& d) {
    return {{"definitionId", d.definition_id},
            {"name", d.name},
            {"version", d.version},
            {"deployedAt", format_iso8601(d.deployed_at)}};
}

json to_json(const DeploymentRecord& d) {
    json j = summary_json(d);
    j["definitionXml"] = procdef::serialize_definition_xml(d.definition);
    j["layoutXml"] = d.layout ? json(procdef::serialize_layout_xml(*d.layout)) : json(nullptr);
    j["image"] = d.image ? json(base64_encode(*d.image)) : json(nullptr);
    return j;
}

TaskInstance task_from_json(const json& j) {
    TaskInstance t;
    t.task_instance_id = j.at("taskInstanceId").get<std::string>();
    t.instance_id = j.at("instanceId").get<std::string>();
    t.token_id = j.at("tokenId").get<std::string>();
    t.node_name = j.at("nodeName").get<std::string>();
    t.task_name = j.at("taskName").get<std::string>();
    t.actor_id = j.at("actorId").get<std::string>();
    t.state = j.at("state").get<std::string>() == "open" ? TaskState::open : TaskState::completed;
    t.ordinal = j.at("ordinal").get<std::uint64_t>();
    t.created_at = parse_iso8601(j.at("createdAt").get<std::string>());
    t.completed_at = read_optional_ts(j, "completedAt");
    return t;
}

ProcessInstance instance_from_json(const json& j) {
    ProcessInstance p;
    p.instance_id = j.at("instanceId").get<std::string>();
    p.definition_id = j.at("definitionId").get<std::string>();
    auto state = j.at("state").get<std::string>();
    p.state = state == "running" ? InstanceState::running
              : state == "ended" ? InstanceState::ended
                                 : InstanceState::stopped;
    p.initiator = j.at("initiator").get<std::string>();
    p.swimlane_bindings = j.at("swimlaneBindings").get<std::map<std::string, std::string>>();
    for (const auto& [k, v] : j.at("variables").items()) p.variables[k] = TypedValue::from_json(v);
    for (const auto& t : j.at("tokens")) {
        Token tok;
        tok.token_id = t.at("tokenId").get<std::string>();
        tok.node = t.at("currentNode").get<std::string>();
        if (!t.at("parent").is_null()) tok.parent = t["parent"].get<std::string>();
        tok.alive = t.at("alive").get<bool>();
        p.tokens.push_back(std::move(tok));
    }
    for (const auto& t : j.at("tasks")) p.tasks.push_back(task_from_json(t));
    p.trail = j.at("trail").get<std::vector<std::string>>();
    p.next_serial = j.at("nextSerial").get<std::uint64_t>();
    p.created_at = parse_iso8601(j.at("createdAt").get<std::string>());
    p.ended_at = read_optional_ts(j, "endedAt");
    return p;
}

DeploymentRecord deployment_from_json(const json& j) {
    DeploymentRecord d;
    d.definition_id = j.at("definitionId").get<std::string>();
    d.name = j.at("name").get<std::string>();
    d.version = j.at("version").get<int>();
    d.deployed_at = parse_iso8601(j.at("deployedAt").get<std::string>());
    d.definition = procdef::parse_definition_xml(j.at("definitionXml").get<std::string>());
    if (!j.at("layoutXml").is_null()) d.layout = procdef::parse_layout_xml(j["layoutXml"].get<std::string>());
    if (!j.at("image").is_null()) d.image = base64_decode(j["image"].get<std::string>());
    return d;
}

} // namespace pubflow::engine
