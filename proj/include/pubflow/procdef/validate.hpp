#pragma once

#include "pubflow/procdef/model.hpp"

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace pubflow::procdef {

// One finding about a definition. `code` is a stable upper-case identifier
// (also used on the wire); `subject` names the offending node, transition
// ("from->to" or "from/name") or swimlane.
struct Violation {
    std::string code;
    std::string subject;
    std::string message;
    bool operator==(const Violation&) const = default;
};

nlohmann::json to_json(const std::vector<Violation>& violations);

inline const std::set<std::string>& default_roles() {
    static const std::set<std::string> roles{"admin", "author", "qa"};
    return roles;
}

std::string transition_label(const Transition& t);

// Checks the structural invariants of a definition. Empty result means
// schema-valid; it says nothing about soundness.
std::vector<Violation> validate_definition(const ProcessDefinition& def,
                                           const std::set<std::string>& roles = default_roles());

} // namespace pubflow::procdef
