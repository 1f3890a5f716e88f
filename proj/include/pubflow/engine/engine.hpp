#pragma once

#include "pubflow/common/journal.hpp"
#include "pubflow/engine/types.hpp"
#include "pubflow/procdef/validate.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <span>

namespace pubflow::engine {

// Lists the actors holding a role. Role swimlanes bind to the
// lexicographically smallest one.
using RoleResolver = std::function<std::vector<std::string>(const std::string& role)>;

class Engine {
public:
    struct Options {
        std::filesystem::path data_dir;
        Journal::Options journal;
        RoleResolver actors_with_role;
        std::set<std::string> roles = procdef::default_roles();
        std::size_t step_limit = 10000;  // node entries per operation
    };

    // Opens (or creates) the journal under data_dir and replays it.
    explicit Engine(Options options);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // Errors: VALIDATION_FAILED, UNSOUND_DEFINITION (detail.violations).
    DeploymentRecord deploy(procdef::ProcessDefinition def, std::optional<procdef::LayoutMetadata> layout = std::nullopt,
                            std::optional<Bytes> image = std::nullopt);
    // parse_archive followed by deploy.
    DeploymentRecord deploy_archive(std::span<const std::uint8_t> archive);

    std::vector<DeploymentRecord> latest_definitions() const;
    std::vector<DeploymentRecord> deployments() const;
    DeploymentRecord deployment(const std::string& definition_id) const;  // UNKNOWN_DEFINITION

    std::pair<ProcessInstance, TaskInstance> start_instance(const std::string& definition_id, const std::string& initiator);

    std::vector<TaskInstance> find_task_instances(const std::string& actor) const;
    TaskInstance task(const std::string& task_instance_id) const;  // UNKNOWN_REFERENT

    ProcessInstance complete_task(const std::string& task_instance_id, const std::optional<std::string>& transition,
                                  const Variables& writes, const Caller& caller);

    void set_variable(const std::string& instance_id, const std::string& name, TypedValue value);
    TypedValue get_variable(const std::string& instance_id, const std::string& name) const;

    ProcessInstance administer_instance(const std::string& instance_id, AdminAction action, const Caller& caller);

    // Accepts an instance id or a task instance id.
    GraphState render_graph_state(const std::string& referent) const;

    ProcessInstance instance(const std::string& instance_id) const;  // UNKNOWN_INSTANCE
    std::vector<ProcessInstance> instances() const;

    // Canonical JSON of the whole engine state; equal before a crash and
    // after replay.
    nlohmann::json dump_state() const;

private:
    struct Slot {
        std::mutex op;  // serializes operations on one instance
        ProcessInstance committed;
    };

    std::shared_ptr<Slot> slot(const std::string& instance_id) const;
    const DeploymentRecord& deployment_locked(const std::string& definition_id) const;
    void commit(ProcessInstance updated, const std::vector<nlohmann::json>& logs);
    void apply_instance(ProcessInstance updated);
    void apply_deployment(DeploymentRecord record);
    void replay();
    void maybe_snapshot();
    nlohmann::json state_locked() const;

    Options options_;
    Journal journal_;
    mutable std::shared_mutex mu_;  // guards everything below; commits take it exclusively
    std::vector<DeploymentRecord> deployments_;
    std::map<std::string, std::shared_ptr<Slot>> instances_;
    std::map<std::string, std::set<std::pair<std::uint64_t, std::string>>> open_by_actor_;
    std::atomic<std::uint64_t> next_instance_{1};
    std::atomic<std::uint64_t> next_ordinal_{1};
};

} // namespace pubflow::engine
