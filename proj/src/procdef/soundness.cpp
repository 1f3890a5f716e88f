#include "pubflow/procdef/soundness.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace pubflow::procdef {

namespace {

using Graph = std::map<std::string, std::vector<std::string>>;

std::set<std::string> reach(const Graph& g, const std::vector<std::string>& from) {
    std::set<std::string> seen(from.begin(), from.end());
    std::deque<std::string> queue(from.begin(), from.end());
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        auto it = g.find(n);
        if (it == g.end()) continue;
        for (const auto& m : it->second) {
            if (seen.insert(m).second) queue.push_back(m);
        }
    }
    return seen;
}

// Pairs each fork with the join(s) its branches run into. A branch is
// explored until it hits a join or an end; a nested fork is skipped over by
// jumping past its own matching join(s). Branches of a multi-way fork must
// all meet at one join. A single branch may finish at any join, since its
// lone token fires whichever join it reaches.
class ForkMatcher {
public:
    using Joins = std::set<std::string>;

    ForkMatcher(const ProcessDefinition& def, const Graph& succ) : def_(def), succ_(succ) {}

    std::optional<Joins> match(const std::string& fork) {
        if (auto it = memo_.find(fork); it != memo_.end()) return it->second;
        stack_.insert(fork);
        auto result = compute(fork);
        stack_.erase(fork);
        memo_[fork] = result;
        return result;
    }

private:
    static constexpr const char* kEnd = "\x01end";

    std::optional<Joins> compute(const std::string& fork) {
        const auto& branches = succ_.at(fork);
        if (branches.empty()) return std::nullopt;
        std::optional<Joins> common;
        for (const auto& start : branches) {
            auto exits = explore(fork, start);
            if (!exits || exits->empty() || exits->count(kEnd)) return std::nullopt;
            if (common && *common != *exits) return std::nullopt;
            common = std::move(exits);
        }
        if (branches.size() > 1 && common->size() != 1) return std::nullopt;
        return common;
    }

    std::optional<std::set<std::string>> explore(const std::string& fork, const std::string& start) {
        std::set<std::string> exits;
        std::set<std::string> seen{start};
        std::deque<std::string> queue{start};
        auto push = [&](const std::string& n) {
            if (seen.insert(n).second) queue.push_back(n);
        };
        while (!queue.empty()) {
            auto n = queue.front();
            queue.pop_front();
            const Node* node = def_.find_node(n);
            if (!node) continue;
            switch (node->kind) {
            case NodeKind::join: exits.insert(n); continue;
            case NodeKind::end: exits.insert(kEnd); continue;
            case NodeKind::fork: {
                if (n == fork || stack_.count(n)) return std::nullopt;
                auto inner = match(n);
                if (!inner) return std::nullopt;
                for (const auto& j : *inner) {
                    for (const auto& m : succ_.at(j)) push(m);
                }
                continue;
            }
            default:
                for (const auto& m : succ_.at(n)) push(m);
            }
        }
        return exits;
    }

    const ProcessDefinition& def_;
    const Graph& succ_;
    std::map<std::string, std::optional<Joins>> memo_;
    std::set<std::string> stack_;
};

// Decisions sitting on a cycle made only of automatic nodes: a token there
// may spin forever inside a single operation.
std::set<std::string> decisions_on_automatic_cycles(const ProcessDefinition& def, const Graph& succ) {
    Graph automatic;
    for (const auto& n : def.nodes) {
        if (!is_automatic(n.kind)) continue;
        auto& edges = automatic[n.name];
        for (const auto& m : succ.at(n.name)) {
            const Node* target = def.find_node(m);
            if (target && is_automatic(target->kind)) edges.push_back(m);
        }
    }
    std::set<std::string> out;
    for (const auto& n : def.nodes) {
        if (n.kind != NodeKind::decision) continue;
        auto from_here = reach(automatic, automatic[n.name]);
        if (from_here.count(n.name)) out.insert(n.name);
    }
    return out;
}

} // namespace

SoundnessReport check_soundness(const ProcessDefinition& def) {
    SoundnessReport report;
    auto add = [&](std::string code, std::string subject, std::string message) {
        report.violations.push_back({std::move(code), std::move(subject), std::move(message)});
    };

    std::vector<std::string> starts, ends;
    Graph succ, pred;
    for (const auto& n : def.nodes) {
        succ[n.name];
        pred[n.name];
        if (n.kind == NodeKind::start) starts.push_back(n.name);
        if (n.kind == NodeKind::end) ends.push_back(n.name);
    }
    if (starts.empty()) add("NO_START", "", "definition has no start node");
    for (std::size_t i = 1; i < starts.size(); ++i) {
        add("MULTIPLE_START", starts[i], "second start node '" + starts[i] + "'");
    }
    if (ends.empty()) add("NO_END", "", "definition has no end node");

    for (const auto& t : def.transitions) {
        if (!def.find_node(t.from) || !def.find_node(t.to)) {
            auto label = transition_label(t);
            add("DANGLING_TRANSITION", label, "transition " + label + " references a missing node");
            continue;
        }
        succ[t.from].push_back(t.to);
        pred[t.to].push_back(t.from);
    }

    for (const auto& n : def.nodes) {
        if (n.task && !def.find_swimlane(n.task->swimlane)) {
            add("UNKNOWN_SWIMLANE", n.name, "task of '" + n.name + "' uses unknown swimlane '" + n.task->swimlane + "'");
        }
    }

    std::set<std::string> reachable;
    if (starts.size() == 1) {
        reachable = reach(succ, starts);
        for (const auto& n : def.nodes) {
            if (!reachable.count(n.name)) add("UNREACHABLE_NODE", n.name, "node '" + n.name + "' cannot be reached from the start");
        }
    } else {
        for (const auto& n : def.nodes) reachable.insert(n.name);
    }

    auto finishing = reach(pred, ends);
    for (const auto& n : def.nodes) {
        if (reachable.count(n.name) && !finishing.count(n.name)) {
            add("DEAD_END", n.name, "no end node can be reached from '" + n.name + "'");
        }
    }

    auto spinning = decisions_on_automatic_cycles(def, succ);
    for (const auto& n : def.nodes) {
        if (n.kind != NodeKind::decision) continue;
        std::set<std::string> selected;
        for (const auto& r : n.rules) {
            if (!def.named_transition(n.name, r.transition)) {
                add("DECISION_RULE_GAP", n.name, "rule of '" + n.name + "' selects missing transition '" + r.transition + "'");
            }
            selected.insert(r.transition);
        }
        if (!def.default_transition(n.name)) {
            add("DECISION_RULE_GAP", n.name, "decision '" + n.name + "' has no default transition for unmatched values");
        }
        for (const auto* t : def.outgoing(n.name)) {
            if (t->name && !selected.count(*t->name)) {
                add("DECISION_RULE_GAP", n.name, "no rule of '" + n.name + "' selects transition '" + *t->name + "'");
            }
        }
        if (spinning.count(n.name)) {
            add("DECISION_RULE_GAP", n.name, "decision '" + n.name + "' lies on a cycle with no task to stop at");
        }
    }

    ForkMatcher matcher(def, succ);
    for (const auto& n : def.nodes) {
        if (n.kind == NodeKind::fork && !matcher.match(n.name)) {
            add("FORK_JOIN_MISMATCH", n.name, "branches of fork '" + n.name + "' do not all meet at one join");
        }
    }

    report.sound = report.violations.empty();
    return report;
}

} // namespace pubflow::procdef
