#pragma once

#include "pubflow/procdef/model.hpp"
#include "pubflow/procdef/validate.hpp"

#include <vector>

namespace pubflow::procdef {

// Violation codes: NO_START, MULTIPLE_START, NO_END, UNREACHABLE_NODE,
// DEAD_END, DANGLING_TRANSITION, UNKNOWN_SWIMLANE, DECISION_RULE_GAP,
// FORK_JOIN_MISMATCH.
struct SoundnessReport {
    bool sound = true;
    std::vector<Violation> violations;
};

// Static check that every execution keeps the option to complete:
// everything reachable, every reachable node can reach an end, decisions
// always have a way out, and each fork's branches meet at a single join.
// Meant for schema-valid input but tolerates anything.
SoundnessReport check_soundness(const ProcessDefinition& def);

} // namespace pubflow::procdef
