#include "pubflow/engine/engine.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/engine/actions.hpp"
#include "pubflow/engine/graph.hpp"
#include "pubflow/procdef/archive.hpp"
#include "pubflow/procdef/soundness.hpp"

#include <algorithm>

namespace pubflow::engine {

using nlohmann::json;
using procdef::EventType;
using procdef::NodeKind;

namespace {

constexpr std::string_view kDeployed = "definition.deployed";
constexpr std::string_view kInstanceUpdated = "instance.updated";
constexpr std::string_view kActionLog = "action.log";

std::uint64_t serial_of(const std::string& id) {
    auto digits = id.substr(1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return 0;
    return std::stoull(digits);
}

// Drives tokens through one definition on a private copy of an instance.
// Any exception leaves the caller's committed state untouched.
class Runner {
public:
    Runner(const DeploymentRecord& dep, ProcessInstance& inst, const Engine::Options& options,
           std::atomic<std::uint64_t>& ordinals, Timestamp now)
        : def_(dep.definition), inst_(inst), options_(options), ordinals_(ordinals), now_(now) {}

    std::vector<json> logs;

    void start() {
        const auto* start = def_.start_node();
        Token root{mint("k"), start->name, std::nullopt, true};
        inst_.tokens.push_back(root);
        enter(root.token_id, start->name);
        drain();
    }

    void take(const std::string& token_id, const procdef::Transition& t) {
        pending_.push_back({token_id, &t, true});
        drain();
    }

private:
    struct Move {
        std::string token_id;
        const procdef::Transition* transition;
        bool fire_leave;
    };

    std::string mint(const char* prefix) { return inst_.instance_id + "." + prefix + std::to_string(inst_.next_serial++); }

    Token& token(const std::string& id) {
        auto it = std::find_if(inst_.tokens.begin(), inst_.tokens.end(), [&](const Token& t) { return t.token_id == id; });
        if (it == inst_.tokens.end()) throw Error(Errc::IO_ERROR, "internal: lost token " + id);
        return *it;
    }

    void fire(const std::vector<procdef::ActionBinding>& actions, EventType event, const std::string& site) {
        for (auto& e : fire_event(inst_, actions, event, site)) {
            if (std::holds_alternative<procdef::LogMessage>(e.effect)) {
                logs.push_back({{"instanceId", inst_.instance_id},
                                {"event", std::string(procdef::to_string(event))},
                                {"site", site},
                                {"message", e.rendered_message}});
            }
        }
    }

    void drain() {
        while (!pending_.empty()) {
            Move m = std::move(pending_.back());
            pending_.pop_back();
            if (m.fire_leave) fire(def_.find_node(m.transition->from)->actions, EventType::node_leave, m.transition->from);
            fire(m.transition->actions, EventType::transition_taken, procdef::transition_label(*m.transition));
            enter(m.token_id, m.transition->to);
        }
    }

    void enter(const std::string& token_id, const std::string& node_name) {
        if (++steps_ > options_.step_limit) {
            throw Error(Errc::EXECUTION_LIMIT, "execution exceeded " + std::to_string(options_.step_limit) +
                                                   " node entries in one operation");
        }
        const procdef::Node& node = *def_.find_node(node_name);
        inst_.trail.push_back(node_name);
        token(token_id).node = node_name;
        fire(node.actions, EventType::node_enter, node_name);

        switch (node.kind) {
        case NodeKind::start:
        case NodeKind::task:
            token(token_id).alive = true;
            create_task(token_id, node);
            break;
        case NodeKind::end: {
            Token& t = token(token_id);
            t.alive = false;
            if (!t.parent) {
                inst_.state = InstanceState::ended;
                inst_.ended_at = now_;
            }
            break;
        }
        case NodeKind::decision:
            pending_.push_back({token_id, &decide(node), true});
            break;
        case NodeKind::fork: {
            token(token_id).alive = false;
            fire(node.actions, EventType::node_leave, node_name);
            auto outs = def_.outgoing(node_name);
            std::vector<std::string> kids;
            for (std::size_t i = 0; i < outs.size(); ++i) {
                kids.push_back(mint("k"));
                inst_.tokens.push_back({kids.back(), node_name, token_id, true});
            }
            for (std::size_t i = outs.size(); i-- > 0;) pending_.push_back({kids[i], outs[i], false});
            break;
        }
        case NodeKind::join: {
            const auto* out = def_.outgoing(node_name).at(0);
            Token& t = token(token_id);
            if (!t.parent) {
                pending_.push_back({token_id, out, true});
                break;
            }
            t.alive = false;
            std::string parent = *t.parent;
            bool all_here = std::all_of(inst_.tokens.begin(), inst_.tokens.end(), [&](const Token& k) {
                return k.parent != parent || (!k.alive && k.node == node_name);
            });
            if (!all_here) break;
            std::erase_if(inst_.tokens, [&](const Token& k) { return k.parent == parent; });
            Token& p = token(parent);
            p.node = node_name;
            p.alive = true;
            pending_.push_back({parent, out, true});
            break;
        }
        }
    }

    const procdef::Transition& decide(const procdef::Node& node) {
        for (const auto& rule : node.rules) {
            auto it = inst_.variables.find(rule.variable);
            if (it != inst_.variables.end() && it->second.render() == rule.equals) {
                if (const auto* t = def_.named_transition(node.name, rule.transition)) return *t;
            }
        }
        if (const auto* t = def_.default_transition(node.name)) return *t;
        throw Error(Errc::NO_DEFAULT_TRANSITION, "decision '" + node.name + "' matched no rule and has no default");
    }

    std::string bind(const std::string& lane_name) {
        if (auto it = inst_.swimlane_bindings.find(lane_name); it != inst_.swimlane_bindings.end()) return it->second;
        const auto* lane = def_.find_swimlane(lane_name);
        std::string actor;
        switch (lane->assignment.kind) {
        case procdef::AssignmentKind::initiator: actor = inst_.initiator; break;
        case procdef::AssignmentKind::fixed_actor: actor = lane->assignment.value; break;
        case procdef::AssignmentKind::role: {
            std::vector<std::string> candidates;
            if (options_.actors_with_role) candidates = options_.actors_with_role(lane->assignment.value);
            if (candidates.empty()) {
                throw Error(Errc::NO_ACTOR_FOR_ROLE, "no actor holds role '" + lane->assignment.value + "' for swimlane '" +
                                                         lane_name + "'");
            }
            actor = *std::min_element(candidates.begin(), candidates.end());
            break;
        }
        }
        inst_.swimlane_bindings[lane_name] = actor;
        return actor;
    }

    void create_task(const std::string& token_id, const procdef::Node& node) {
        TaskInstance t;
        t.task_instance_id = mint("t");
        t.instance_id = inst_.instance_id;
        t.token_id = token_id;
        t.node_name = node.name;
        t.task_name = node.task->task_name;
        t.actor_id = bind(node.task->swimlane);
        t.ordinal = ordinals_++;
        t.created_at = now_;
        inst_.tasks.push_back(std::move(t));
    }

    const procdef::ProcessDefinition& def_;
    ProcessInstance& inst_;
    const Engine::Options& options_;
    std::atomic<std::uint64_t>& ordinals_;
    Timestamp now_;
    std::vector<Move> pending_;
    std::size_t steps_ = 0;
};

TaskInstance& find_task(ProcessInstance& inst, const std::string& task_id) {
    for (auto& t : inst.tasks) {
        if (t.task_instance_id == task_id) return t;
    }
    throw Error(Errc::UNKNOWN_REFERENT, "unknown task instance " + task_id);
}

std::string instance_of_task(const std::string& task_id) { return task_id.substr(0, task_id.find('.')); }

// Completes `task` along `transition` (or the default) on a working copy.
void complete_on(Runner& runner, const procdef::ProcessDefinition& def, ProcessInstance& work, const std::string& task_id,
                 const std::optional<std::string>& transition, const Variables& writes, Timestamp now) {
    TaskInstance& task = find_task(work, task_id);
    if (task.state != TaskState::open) throw Error(Errc::TASK_NOT_OPEN, "task " + task_id + " is not open");
    const procdef::Transition* t = nullptr;
    if (transition) {
        t = def.named_transition(task.node_name, *transition);
        if (!t) {
            throw Error(Errc::UNKNOWN_TRANSITION,
                        "node '" + task.node_name + "' has no transition named '" + *transition + "'");
        }
    } else {
        t = def.default_transition(task.node_name);
        if (!t) throw Error(Errc::NO_DEFAULT_TRANSITION, "node '" + task.node_name + "' has no default transition");
    }
    for (const auto& [k, v] : writes) work.variables[k] = v;
    task.state = TaskState::completed;
    task.completed_at = now;
    std::string token_id = task.token_id;
    runner.take(token_id, *t);
}

} // namespace

Engine::Engine(Options options) : options_(std::move(options)), journal_(options_.data_dir / "engine", options_.journal) {
    replay();
}

Engine::~Engine() = default;

void Engine::replay() {
    auto recovered = journal_.recover();
    if (recovered.snapshot) {
        const auto& s = *recovered.snapshot;
        for (const auto& d : s.at("deployments")) apply_deployment(deployment_from_json(d));
        for (const auto& i : s.at("instances")) apply_instance(instance_from_json(i));
    }
    for (const auto& r : recovered.records) {
        if (r.kind == kDeployed) {
            apply_deployment(deployment_from_json(r.payload));
        } else if (r.kind == kInstanceUpdated) {
            apply_instance(instance_from_json(r.payload));
        }
    }
}

void Engine::apply_deployment(DeploymentRecord record) {
    deployments_.push_back(std::move(record));
}

void Engine::apply_instance(ProcessInstance updated) {
    auto& s = instances_[updated.instance_id];
    if (!s) s = std::make_shared<Slot>();
    for (const auto& t : s->committed.tasks) {
        if (t.state == TaskState::open) open_by_actor_[t.actor_id].erase({t.ordinal, t.task_instance_id});
    }
    for (const auto& t : updated.tasks) {
        if (t.state == TaskState::open) open_by_actor_[t.actor_id].insert({t.ordinal, t.task_instance_id});
        if (t.ordinal >= next_ordinal_) next_ordinal_ = t.ordinal + 1;
    }
    auto serial = serial_of(updated.instance_id);
    if (serial >= next_instance_) next_instance_ = serial + 1;
    s->committed = std::move(updated);
}

void Engine::commit(ProcessInstance updated, const std::vector<json>& logs) {
    std::unique_lock lock(mu_);
    for (const auto& l : logs) journal_.append(kActionLog, l);
    journal_.append(kInstanceUpdated, to_json(updated));
    apply_instance(std::move(updated));
    maybe_snapshot();
}

void Engine::maybe_snapshot() {
    if (journal_.snapshot_due()) journal_.write_snapshot(journal_.last_seq(), state_locked());
}

json Engine::state_locked() const {
    json state = {{"deployments", json::array()}, {"instances", json::array()}};
    for (const auto& d : deployments_) state["deployments"].push_back(to_json(d));
    for (const auto& [id, s] : instances_) state["instances"].push_back(to_json(s->committed));
    return state;
}

std::shared_ptr<Engine::Slot> Engine::slot(const std::string& instance_id) const {
    std::shared_lock lock(mu_);
    auto it = instances_.find(instance_id);
    if (it == instances_.end()) throw Error(Errc::UNKNOWN_INSTANCE, "unknown instance " + instance_id);
    return it->second;
}

const DeploymentRecord& Engine::deployment_locked(const std::string& definition_id) const {
    for (const auto& d : deployments_) {
        if (d.definition_id == definition_id) return d;
    }
    throw Error(Errc::UNKNOWN_DEFINITION, "unknown definition " + definition_id);
}

DeploymentRecord Engine::deploy(procdef::ProcessDefinition def, std::optional<procdef::LayoutMetadata> layout,
                                std::optional<Bytes> image) {
    auto violations = procdef::validate_definition(def, options_.roles);
    if (!violations.empty()) {
        throw Error(Errc::VALIDATION_FAILED, "definition '" + def.name + "' is not valid",
                    {{"violations", procdef::to_json(violations)}});
    }
    auto report = procdef::check_soundness(def);
    if (!report.sound) {
        std::string first = report.violations.front().code + " " + report.violations.front().subject;
        throw Error(Errc::UNSOUND_DEFINITION, "definition '" + def.name + "' is not sound (" + first + ")",
                    {{"violations", procdef::to_json(report.violations)}});
    }
    if (layout) {
        for (const auto& [node, g] : layout->per_node) {
            if (!def.find_node(node)) {
                throw Error(Errc::SCHEMA_VIOLATION, "layout references unknown node '" + node + "'",
                            {{"path", "/layout/node[@name='" + node + "']"}, {"message", "no such node"}});
            }
        }
    }

    std::unique_lock lock(mu_);
    DeploymentRecord rec;
    rec.name = def.name;
    for (const auto& d : deployments_) {
        if (d.name == def.name) rec.version = std::max(rec.version, d.version);
    }
    rec.version += 1;
    rec.definition_id = "d" + std::to_string(deployments_.size() + 1);
    rec.deployed_at = now_ms();
    rec.definition = std::move(def);
    rec.layout = std::move(layout);
    rec.image = std::move(image);
    journal_.append(kDeployed, to_json(rec));
    apply_deployment(rec);
    maybe_snapshot();
    return rec;
}

DeploymentRecord Engine::deploy_archive(std::span<const std::uint8_t> archive) {
    auto parsed = procdef::parse_archive(archive);
    return deploy(std::move(parsed.definition), std::move(parsed.layout), std::move(parsed.image));
}

std::vector<DeploymentRecord> Engine::latest_definitions() const {
    std::shared_lock lock(mu_);
    std::map<std::string, const DeploymentRecord*> latest;
    for (const auto& d : deployments_) {
        auto& slot = latest[d.name];
        if (!slot || slot->version < d.version) slot = &d;
    }
    std::vector<DeploymentRecord> out;
    for (const auto& [name, d] : latest) out.push_back(*d);
    return out;
}

std::vector<DeploymentRecord> Engine::deployments() const {
    std::shared_lock lock(mu_);
    return deployments_;
}

DeploymentRecord Engine::deployment(const std::string& definition_id) const {
    std::shared_lock lock(mu_);
    return deployment_locked(definition_id);
}

std::pair<ProcessInstance, TaskInstance> Engine::start_instance(const std::string& definition_id,
                                                               const std::string& initiator) {
    DeploymentRecord dep = deployment(definition_id);
    ProcessInstance work;
    work.instance_id = "i" + std::to_string(next_instance_++);
    work.definition_id = definition_id;
    work.initiator = initiator;
    work.created_at = now_ms();

    Runner runner(dep, work, options_, next_ordinal_, work.created_at);
    runner.start();
    TaskInstance first = work.tasks.at(0);
    commit(work, runner.logs);
    return {work, first};
}

std::vector<TaskInstance> Engine::find_task_instances(const std::string& actor) const {
    std::shared_lock lock(mu_);
    std::vector<TaskInstance> out;
    auto it = open_by_actor_.find(actor);
    if (it == open_by_actor_.end()) return out;
    for (auto e = it->second.rbegin(); e != it->second.rend(); ++e) {
        const auto& inst = instances_.at(instance_of_task(e->second))->committed;
        for (const auto& t : inst.tasks) {
            if (t.task_instance_id == e->second) out.push_back(t);
        }
    }
    return out;
}

TaskInstance Engine::task(const std::string& task_instance_id) const {
    std::shared_lock lock(mu_);
    auto it = instances_.find(instance_of_task(task_instance_id));
    if (it == instances_.end()) throw Error(Errc::UNKNOWN_REFERENT, "unknown task instance " + task_instance_id);
    auto copy = it->second->committed;
    return find_task(copy, task_instance_id);
}

ProcessInstance Engine::complete_task(const std::string& task_instance_id, const std::optional<std::string>& transition,
                                      const Variables& writes, const Caller& caller) {
    std::shared_ptr<Slot> s;
    try {
        s = slot(instance_of_task(task_instance_id));
    } catch (const Error&) {
        throw Error(Errc::UNKNOWN_REFERENT, "unknown task instance " + task_instance_id);
    }
    std::lock_guard op(s->op);
    ProcessInstance work = s->committed;
    const TaskInstance& task = find_task(work, task_instance_id);
    if (task.state != TaskState::open) throw Error(Errc::TASK_NOT_OPEN, "task " + task_instance_id + " is not open");
    if (!caller.admin && caller.actor_id != task.actor_id) {
        throw Error(Errc::FORBIDDEN_ACTOR, "task " + task_instance_id + " is assigned to another actor");
    }
    DeploymentRecord dep = deployment(work.definition_id);
    auto now = now_ms();
    Runner runner(dep, work, options_, next_ordinal_, now);
    complete_on(runner, dep.definition, work, task_instance_id, transition, writes, now);
    commit(work, runner.logs);
    return work;
}

void Engine::set_variable(const std::string& instance_id, const std::string& name, TypedValue value) {
    auto s = slot(instance_id);
    std::lock_guard op(s->op);
    ProcessInstance work = s->committed;
    work.variables[name] = std::move(value);
    commit(std::move(work), {});
}

TypedValue Engine::get_variable(const std::string& instance_id, const std::string& name) const {
    auto s = slot(instance_id);
    std::shared_lock lock(mu_);
    const auto& vars = s->committed.variables;
    auto it = vars.find(name);
    if (it == vars.end()) throw Error(Errc::UNKNOWN_VARIABLE, "instance " + instance_id + " has no variable '" + name + "'");
    return it->second;
}

ProcessInstance Engine::administer_instance(const std::string& instance_id, AdminAction action, const Caller& caller) {
    if (!caller.admin) throw Error(Errc::FORBIDDEN_ACTOR, "administering instances requires the admin role");
    auto s = slot(instance_id);
    std::lock_guard op(s->op);
    ProcessInstance work = s->committed;
    if (work.state != InstanceState::running) {
        throw Error(Errc::INSTANCE_NOT_RUNNING, "instance " + instance_id + " is " + std::string(to_string(work.state)));
    }
    auto now = now_ms();
    std::vector<json> logs;
    if (action == AdminAction::stop) {
        for (auto& t : work.tokens) t.alive = false;
        for (auto& t : work.tasks) {
            if (t.state == TaskState::open) {
                t.state = TaskState::completed;
                t.completed_at = now;
            }
        }
        work.state = InstanceState::stopped;
        work.ended_at = now;
    } else {
        auto open = work.open_tasks();
        if (open.empty()) throw Error(Errc::NO_DEFAULT_TRANSITION, "instance " + instance_id + " has no open task");
        auto oldest = *std::min_element(open.begin(), open.end(),
                                        [](const TaskInstance* a, const TaskInstance* b) { return a->ordinal < b->ordinal; });
        std::string task_id = oldest->task_instance_id;
        DeploymentRecord dep = deployment(work.definition_id);
        Runner runner(dep, work, options_, next_ordinal_, now);
        complete_on(runner, dep.definition, work, task_id, std::nullopt, {}, now);
        logs = std::move(runner.logs);
    }
    commit(work, logs);
    return work;
}

GraphState Engine::render_graph_state(const std::string& referent) const {
    std::shared_lock lock(mu_);
    auto it = instances_.find(referent);
    if (it == instances_.end()) {
        it = instances_.find(instance_of_task(referent));
        if (it == instances_.end()) throw Error(Errc::UNKNOWN_REFERENT, "no instance or task named " + referent);
        const auto& tasks = it->second->committed.tasks;
        bool known = std::any_of(tasks.begin(), tasks.end(), [&](const auto& t) { return t.task_instance_id == referent; });
        if (!known) throw Error(Errc::UNKNOWN_REFERENT, "no instance or task named " + referent);
    }
    const auto& inst = it->second->committed;
    return build_graph_state(deployment_locked(inst.definition_id), inst);
}

ProcessInstance Engine::instance(const std::string& instance_id) const {
    auto s = slot(instance_id);
    std::shared_lock lock(mu_);
    return s->committed;
}

std::vector<ProcessInstance> Engine::instances() const {
    std::shared_lock lock(mu_);
    std::vector<ProcessInstance> out;
    for (const auto& [id, s] : instances_) out.push_back(s->committed);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return serial_of(a.instance_id) < serial_of(b.instance_id);
    });
    return out;
}

json Engine::dump_state() const {
    std::shared_lock lock(mu_);
    return state_locked();
}

} // namespace pubflow::engine
