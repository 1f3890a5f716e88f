#pragma once

#include "pubflow/engine/types.hpp"
#include "pubflow/procdef/model.hpp"

#include <string>
#include <vector>

namespace pubflow::engine {

struct ExecutedEffect {
    procdef::EventType event;
    std::string site;  // node name or transition label
    procdef::Effect effect;
    std::string rendered_message;  // log effects only
};

// Replaces ${name} with the variable's rendering; unknown names stay literal.
std::string render_template(const std::string& tmpl, const Variables& vars);

// Runs the bindings of `actions` that match `event`, in declaration order.
// setVariable writes land in `instance.variables` immediately, so later
// effects in the same call already see them.
std::vector<ExecutedEffect> fire_event(ProcessInstance& instance, const std::vector<procdef::ActionBinding>& actions,
                                       procdef::EventType event, const std::string& site);

} // namespace pubflow::engine
