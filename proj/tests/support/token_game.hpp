#pragma once

// Exhaustive token-game simulation of a process definition, used as a test
// oracle for the static soundness check. It shares no code with the engine
// or the checker: it only reads the definition model.
//
// Every decision is treated as free choice among the transitions its rules
// or default could select. A definition counts as sound when, over all
// reachable states, no step can diverge or get stuck, every node is entered
// and every transition taken at least once, and a final state (root token
// finished at an end node) stays reachable from every reachable state.

#include "pubflow/procdef/model.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pubflow::testing {

struct GameToken {
    std::string node;
    bool alive = true;
    std::vector<GameToken> kids;

    std::string canonical() const {
        std::vector<std::string> parts;
        for (const auto& k : kids) parts.push_back(k.canonical());
        std::sort(parts.begin(), parts.end());
        std::string s = node + (alive ? "+" : "-") + "(";
        for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
        return s + ")";
    }
};

struct GameVerdict {
    bool sound = false;
    std::string reason;
    std::size_t states = 0;
};

class TokenGame {
public:
    explicit TokenGame(const procdef::ProcessDefinition& def, std::size_t state_cap = 20000)
        : def_(def), cap_(state_cap) {
        for (std::size_t i = 0; i < def.transitions.size(); ++i) out_[def.transitions[i].from].push_back(i);
    }

    GameVerdict run() {
        const procdef::Node* start = nullptr;
        for (const auto& n : def_.nodes) {
            if (n.kind == procdef::NodeKind::start) start = &n;
        }
        if (!start) return {false, "no start", 0};

        GameToken init{start->name, true, {}};
        entered_.insert(start->name);
        std::map<std::string, std::size_t> ids;
        std::vector<GameToken> states;
        std::vector<std::vector<std::size_t>> edges;
        auto intern = [&](const GameToken& t) {
            auto key = t.canonical();
            auto [it, fresh] = ids.emplace(key, states.size());
            if (fresh) {
                states.push_back(t);
                edges.emplace_back();
            }
            return std::make_pair(it->second, fresh);
        };
        std::deque<std::size_t> queue{intern(init).first};
        while (!queue.empty()) {
            auto id = queue.front();
            queue.pop_front();
            GameToken state = states[id];
            std::vector<std::vector<std::size_t>> resting;
            collect_resting(state, {}, resting);
            for (const auto& path : resting) {
                const auto& here = at(state, path).node;
                for (auto ti : out_[here]) {
                    std::vector<GameToken> results;
                    Config c{state, {{path, def_.transitions[ti].to, static_cast<long>(ti)}}, 0};
                    on_path_.clear();
                    done_.clear();
                    if (!advance(std::move(c), results)) return {false, bad_, states.size()};
                    for (const auto& r : results) {
                        // Nesting deeper than the node count can only come
                        // from a fork re-entered by its own branch: unbounded.
                        if (depth(r) > def_.nodes.size()) return {false, "unbounded token nesting", states.size()};
                        auto [rid, fresh] = intern(r);
                        edges[id].push_back(rid);
                        if (fresh) {
                            if (states.size() > cap_) return {false, "state space exceeds cap", states.size()};
                            queue.push_back(rid);
                        }
                    }
                }
            }
        }

        for (const auto& n : def_.nodes) {
            if (!entered_.count(n.name)) return {false, "node never entered: " + n.name, states.size()};
        }
        for (std::size_t i = 0; i < def_.transitions.size(); ++i) {
            if (!taken_.count(i)) return {false, "transition never taken", states.size()};
        }

        // Backward reachability from the final states.
        std::vector<std::vector<std::size_t>> back(states.size());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            for (auto j : edges[i]) back[j].push_back(i);
        }
        std::vector<bool> good(states.size(), false);
        std::deque<std::size_t> work;
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (is_final(states[i])) {
                good[i] = true;
                work.push_back(i);
            }
        }
        while (!work.empty()) {
            auto i = work.front();
            work.pop_front();
            for (auto j : back[i]) {
                if (!good[j]) {
                    good[j] = true;
                    work.push_back(j);
                }
            }
        }
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (!good[i]) return {false, "state cannot complete: " + states[i].canonical(), states.size()};
        }
        return {true, "", states.size()};
    }

private:
    struct Item {
        std::vector<std::size_t> path;
        std::string node;
        long via;  // transition index
    };
    struct Config {
        GameToken root;
        std::vector<Item> stack;
        int entries;
    };

    static GameToken& at(GameToken& root, const std::vector<std::size_t>& path) {
        GameToken* t = &root;
        for (auto i : path) t = &t->kids[i];
        return *t;
    }

    static std::size_t depth(const GameToken& t) {
        std::size_t d = 0;
        for (const auto& k : t.kids) d = std::max(d, depth(k));
        return d + 1;
    }

    bool is_final(const GameToken& root) const {
        const auto* n = def_.find_node(root.node);
        return !root.alive && root.kids.empty() && n && n->kind == procdef::NodeKind::end;
    }

    void collect_resting(const GameToken& t, std::vector<std::size_t> path, std::vector<std::vector<std::size_t>>& out) {
        if (t.alive) out.push_back(path);
        for (std::size_t i = 0; i < t.kids.size(); ++i) {
            auto p = path;
            p.push_back(i);
            collect_resting(t.kids[i], p, out);
        }
    }

    // Runs one step to completion along every decision outcome. Returns
    // false (with bad_ set) when some outcome diverges or gets stuck.
    bool advance(Config c, std::vector<GameToken>& results) {
        std::vector<std::string> mine;
        auto settle = [&] {
            for (auto& k : mine) {
                on_path_.erase(k);
                done_.insert(std::move(k));
            }
        };
        while (!c.stack.empty()) {
            // A configuration seen again on the same path is a loop with no
            // resting point; one seen on another path was already explored.
            auto key = raw(c);
            if (on_path_.count(key)) {
                bad_ = "step diverges";
                return false;
            }
            if (done_.count(key)) {
                settle();
                return true;
            }
            on_path_.insert(key);
            mine.push_back(std::move(key));

            Item item = std::move(c.stack.back());
            c.stack.pop_back();
            if (++c.entries > 1000) {
                bad_ = "step diverges";
                return false;
            }
            taken_.insert(static_cast<std::size_t>(item.via));
            entered_.insert(item.node);
            const procdef::Node* node = def_.find_node(item.node);
            if (!node) {
                bad_ = "transition into missing node";
                return false;
            }
            GameToken& tok = at(c.root, item.path);
            switch (node->kind) {
            case procdef::NodeKind::start:
            case procdef::NodeKind::task:
                tok.node = node->name;
                tok.alive = true;
                break;
            case procdef::NodeKind::end:
                tok.node = node->name;
                tok.alive = false;
                break;
            case procdef::NodeKind::decision: {
                tok.node = node->name;
                std::vector<std::size_t> options;
                bool has_default = false;
                for (auto ti : out_[node->name]) {
                    const auto& t = def_.transitions[ti];
                    bool chosen_by_rule = t.name && std::any_of(node->rules.begin(), node->rules.end(),
                                                                [&](const auto& r) { return r.transition == *t.name; });
                    if (!t.name && !has_default) {
                        has_default = true;
                        options.push_back(ti);
                    } else if (chosen_by_rule) {
                        options.push_back(ti);
                    }
                }
                if (!has_default) {
                    bad_ = "decision without fallback: " + node->name;
                    return false;
                }
                for (std::size_t k = 0; k + 1 < options.size(); ++k) {
                    Config copy = c;
                    copy.stack.push_back({item.path, def_.transitions[options[k]].to, static_cast<long>(options[k])});
                    if (!advance(std::move(copy), results)) return false;
                }
                auto last = options.back();
                c.stack.push_back({item.path, def_.transitions[last].to, static_cast<long>(last)});
                break;
            }
            case procdef::NodeKind::fork: {
                if (item.path.size() >= def_.nodes.size()) {
                    bad_ = "unbounded token nesting";
                    return false;
                }
                tok.node = node->name;
                tok.alive = false;
                const auto& outs = out_[node->name];
                for (std::size_t k = 0; k < outs.size(); ++k) tok.kids.push_back({node->name, true, {}});
                for (std::size_t k = outs.size(); k-- > 0;) {
                    auto p = item.path;
                    p.push_back(k);
                    c.stack.push_back({p, def_.transitions[outs[k]].to, static_cast<long>(outs[k])});
                }
                break;
            }
            case procdef::NodeKind::join: {
                const auto& outs = out_[node->name];
                if (outs.size() != 1) {
                    bad_ = "join without single exit";
                    return false;
                }
                if (item.path.empty()) {
                    c.stack.push_back({item.path, def_.transitions[outs[0]].to, static_cast<long>(outs[0])});
                    break;
                }
                tok.node = node->name;
                tok.alive = false;
                auto parent_path = item.path;
                parent_path.pop_back();
                GameToken& parent = at(c.root, parent_path);
                bool all_here = std::all_of(parent.kids.begin(), parent.kids.end(),
                                            [&](const GameToken& k) { return !k.alive && k.node == node->name; });
                if (all_here) {
                    parent.kids.clear();
                    parent.node = node->name;
                    c.stack.push_back({parent_path, def_.transitions[outs[0]].to, static_cast<long>(outs[0])});
                }
                break;
            }
            }
        }
        settle();
        results.push_back(std::move(c.root));
        return true;
    }

    static void raw_token(const GameToken& t, std::string& out) {
        out += t.node;
        out += t.alive ? '+' : '-';
        out += '(';
        for (const auto& k : t.kids) raw_token(k, out);
        out += ')';
    }

    static std::string raw(const Config& c) {
        std::string out;
        raw_token(c.root, out);
        for (const auto& item : c.stack) {
            out += '|';
            for (auto i : item.path) out += std::to_string(i) + '.';
            out += item.node + '#' + std::to_string(item.via);
        }
        return out;
    }

    const procdef::ProcessDefinition& def_;
    std::size_t cap_;
    std::map<std::string, std::vector<std::size_t>> out_;
    std::set<std::string> entered_;
    std::set<std::size_t> taken_;
    std::string bad_;
    std::set<std::string> on_path_;
    std::set<std::string> done_;
};

inline GameVerdict play_token_game(const procdef::ProcessDefinition& def) { return TokenGame(def).run(); }

} // namespace pubflow::testing
