#include "pubflow/procdef/xml_format.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/common/xml.hpp"

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <set>

namespace pubflow::procdef {

namespace {

struct ElementTag {
    NodeKind kind;
    std::string_view tag;
};

constexpr ElementTag kNodeTags[] = {
    {NodeKind::start, "start-state"}, {NodeKind::task, "task-node"}, {NodeKind::decision, "decision"},
    {NodeKind::fork, "fork"},         {NodeKind::join, "join"},      {NodeKind::end, "end-state"},
};

std::string_view tag_for(NodeKind k) {
    for (const auto& t : kNodeTags) {
        if (t.kind == k) return t.tag;
    }
    return "task-node";
}

std::optional<NodeKind> kind_for_tag(std::string_view tag) {
    for (const auto& t : kNodeTags) {
        if (t.tag == tag) return t.kind;
    }
    return std::nullopt;
}

[[noreturn]] void violation(const std::string& path, const std::string& message) {
    throw Error(Errc::SCHEMA_VIOLATION, "schema violation at " + path + ": " + message,
                {{"path", path}, {"message", message}});
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

// Walks one element: checks namespace, attribute whitelist and stray text,
// and hands out child paths with per-name sibling indexes.
class Scope {
public:
    Scope(const xml::Element& el, std::string path, std::string_view ns, std::initializer_list<std::string_view> allowed)
        : el_(el), path_(std::move(path)) {
        if (el.ns != ns) violation(path_, "element must be in namespace " + std::string(ns));
        for (const auto& [key, value] : el.attributes) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                violation(path_ + "/@" + key, "unexpected attribute");
            }
        }
        if (!blank(el.text)) violation(path_, "unexpected text content");
    }

    const std::string& path() const { return path_; }

    std::string required(std::string_view key) const {
        const auto* v = el_.attr(key);
        if (!v) violation(path_ + "/@" + std::string(key), "required attribute missing");
        return *v;
    }

    std::optional<std::string> optional(std::string_view key) const {
        const auto* v = el_.attr(key);
        return v ? std::optional<std::string>(*v) : std::nullopt;
    }

    int non_negative(std::string_view key) const {
        auto s = required(key);
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v < 0) {
            violation(path_ + "/@" + std::string(key), "expected a non-negative integer, got '" + s + "'");
        }
        return v;
    }

    std::string child_path(const xml::Element& child) {
        int index = ++counts_[child.name];
        return path_ + "/" + child.name + "[" + std::to_string(index) + "]";
    }

private:
    const xml::Element& el_;
    std::string path_;
    std::map<std::string, int> counts_;
};

Effect parse_effect(const xml::Element& el, const std::string& path) {
    if (el.name == "set-variable") {
        Scope s(el, path, kNamespace, {"name", "value"});
        return SetVariable{s.required("name"), s.required("value")};
    }
    if (el.name == "log") {
        Scope s(el, path, kNamespace, {"message"});
        return LogMessage{s.required("message")};
    }
    violation(path, "expected set-variable or log");
}

TaskSpec parse_task(const xml::Element& el, const std::string& path) {
    Scope s(el, path, kNamespace, {"name", "swimlane"});
    TaskSpec task{s.required("name"), s.required("swimlane"), {}};
    for (const auto& child : el.children) {
        auto cp = s.child_path(child);
        if (child.name != "field") violation(cp, "unexpected element in task");
        Scope f(child, cp, kNamespace, {"name", "label", "kind"});
        FormField field;
        field.name = f.required("name");
        field.label = f.optional("label").value_or(field.name);
        if (auto k = f.optional("kind")) {
            auto kind = field_kind_from(*k);
            if (!kind) violation(cp + "/@kind", "unknown field kind '" + *k + "'");
            field.kind = *kind;
        }
        task.form_fields.push_back(std::move(field));
    }
    return task;
}

Swimlane parse_swimlane(const xml::Element& el, const std::string& path) {
    Scope s(el, path, kNamespace, {"name"});
    Swimlane lane{s.required("name"), {}};
    bool seen = false;
    for (const auto& child : el.children) {
        auto cp = s.child_path(child);
        if (child.name != "assignment") violation(cp, "unexpected element in swimlane");
        if (seen) violation(cp, "a swimlane has exactly one assignment");
        seen = true;
        Scope a(child, cp, kNamespace, {"type", "role", "actor"});
        auto type = a.required("type");
        if (type == "initiator") {
            lane.assignment = {AssignmentKind::initiator, ""};
        } else if (type == "role") {
            lane.assignment = {AssignmentKind::role, a.required("role")};
        } else if (type == "actor") {
            lane.assignment = {AssignmentKind::fixed_actor, a.required("actor")};
        } else {
            violation(cp + "/@type", "unknown assignment type '" + type + "'");
        }
    }
    if (!seen) violation(path, "swimlane requires an assignment");
    return lane;
}

void parse_node(const xml::Element& el, const std::string& path, NodeKind kind, ProcessDefinition& def) {
    Scope s(el, path, kNamespace, {"name"});
    Node node;
    node.name = s.required("name");
    node.kind = kind;
    for (const auto& child : el.children) {
        auto cp = s.child_path(child);
        if (child.name == "task") {
            if (node.task) violation(cp, "a node has at most one task");
            node.task = parse_task(child, cp);
        } else if (child.name == "event") {
            Scope e(child, cp, kNamespace, {"type"});
            auto type = e.required("type");
            auto ev = event_type_from(type);
            if (!ev || *ev == EventType::transition_taken) {
                violation(cp + "/@type", "node events are node-enter or node-leave, got '" + type + "'");
            }
            for (const auto& eff : child.children) {
                node.actions.push_back({*ev, parse_effect(eff, e.child_path(eff))});
            }
        } else if (child.name == "rule") {
            Scope r(child, cp, kNamespace, {"variable", "equals", "transition"});
            node.rules.push_back({r.required("variable"), r.required("equals"), r.required("transition")});
        } else if (child.name == "transition") {
            Scope t(child, cp, kNamespace, {"name", "to"});
            Transition tr;
            tr.name = t.optional("name");
            tr.from = node.name;
            tr.to = t.required("to");
            for (const auto& eff : child.children) {
                tr.actions.push_back({EventType::transition_taken, parse_effect(eff, t.child_path(eff))});
            }
            def.transitions.push_back(std::move(tr));
        } else {
            violation(cp, "unexpected element in " + el.name);
        }
    }
    def.nodes.push_back(std::move(node));
}

void write_effects(xml::Writer& w, const std::vector<ActionBinding>& actions) {
    for (const auto& a : actions) {
        if (const auto* sv = std::get_if<SetVariable>(&a.effect)) {
            w.empty("set-variable", {{"name", sv->name}, {"value", sv->value}});
        } else {
            w.empty("log", {{"message", std::get<LogMessage>(a.effect).message_template}});
        }
    }
}

} // namespace

ProcessDefinition parse_definition_xml(std::string_view text) {
    auto root = xml::parse(text);
    const std::string path = "/process-definition";
    if (root.name != "process-definition") violation("/" + root.name, "root element must be process-definition");
    Scope s(root, path, kNamespace, {"name"});
    ProcessDefinition def;
    def.name = s.required("name");
    for (const auto& child : root.children) {
        auto cp = s.child_path(child);
        if (child.name == "variable") {
            Scope v(child, cp, kNamespace, {"name"});
            def.variables.push_back(v.required("name"));
        } else if (child.name == "swimlane") {
            def.swimlanes.push_back(parse_swimlane(child, cp));
        } else if (auto kind = kind_for_tag(child.name)) {
            parse_node(child, cp, *kind, def);
        } else {
            violation(cp, "unexpected element in process-definition");
        }
    }
    return def;
}

std::string serialize_definition_xml(const ProcessDefinition& def) {
    xml::Writer w;
    w.open("process-definition", {{"xmlns", std::string(kNamespace)}, {"name", def.name}});
    for (const auto& v : def.variables) w.empty("variable", {{"name", v}});
    for (const auto& lane : def.swimlanes) {
        w.open("swimlane", {{"name", lane.name}});
        switch (lane.assignment.kind) {
        case AssignmentKind::initiator: w.empty("assignment", {{"type", "initiator"}}); break;
        case AssignmentKind::role: w.empty("assignment", {{"type", "role"}, {"role", lane.assignment.value}}); break;
        case AssignmentKind::fixed_actor:
            w.empty("assignment", {{"type", "actor"}, {"actor", lane.assignment.value}});
            break;
        }
        w.close();
    }
    for (const auto& node : def.nodes) {
        w.open(tag_for(node.kind), {{"name", node.name}});
        if (node.task) {
            w.open("task", {{"name", node.task->task_name}, {"swimlane", node.task->swimlane}});
            for (const auto& f : node.task->form_fields) {
                w.empty("field", {{"name", f.name}, {"label", f.label}, {"kind", std::string(to_string(f.kind))}});
            }
            w.close();
        }
        for (const auto& r : node.rules) {
            w.empty("rule", {{"variable", r.variable}, {"equals", r.equals}, {"transition", r.transition}});
        }
        // One <event> per run of equal event types keeps declaration order intact.
        for (std::size_t i = 0; i < node.actions.size();) {
            std::size_t j = i;
            while (j < node.actions.size() && node.actions[j].event == node.actions[i].event) ++j;
            w.open("event", {{"type", std::string(to_string(node.actions[i].event))}});
            write_effects(w, std::vector<ActionBinding>(node.actions.begin() + static_cast<long>(i),
                                                    node.actions.begin() + static_cast<long>(j)));
            w.close();
            i = j;
        }
        for (const auto& t : def.transitions) {
            if (t.from != node.name) continue;
            xml::Writer::Attributes attrs;
            if (t.name) attrs.emplace_back("name", *t.name);
            attrs.emplace_back("to", t.to);
            if (t.actions.empty()) {
                w.empty("transition", attrs);
            } else {
                w.open("transition", attrs);
                write_effects(w, t.actions);
                w.close();
            }
        }
        w.close();
    }
    return w.str();
}

LayoutMetadata parse_layout_xml(std::string_view text) {
    auto root = xml::parse(text);
    const std::string path = "/layout";
    if (root.name != "layout") violation("/" + root.name, "root element must be layout");
    Scope s(root, path, kLayoutNamespace, {});
    LayoutMetadata layout;
    for (const auto& child : root.children) {
        auto cp = s.child_path(child);
        if (child.name != "node") violation(cp, "unexpected element in layout");
        Scope n(child, cp, kLayoutNamespace, {"name", "x", "y", "width", "height"});
        auto name = n.required("name");
        Geometry g{n.non_negative("x"), n.non_negative("y"), n.non_negative("width"), n.non_negative("height")};
        if (!layout.per_node.emplace(name, g).second) violation(cp + "/@name", "duplicate layout for node '" + name + "'");
    }
    return layout;
}

std::string serialize_layout_xml(const LayoutMetadata& layout) {
    xml::Writer w;
    w.open("layout", {{"xmlns", std::string(kLayoutNamespace)}});
    for (const auto& [name, g] : layout.per_node) {
        w.empty("node", {{"name", name},
                         {"x", std::to_string(g.x)},
                         {"y", std::to_string(g.y)},
                         {"width", std::to_string(g.width)},
                         {"height", std::to_string(g.height)}});
    }
    return w.str();
}

} // namespace pubflow::procdef
