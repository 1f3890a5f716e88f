#include "pubflow/engine/actions.hpp"

namespace pubflow::engine {

std::string render_template(const std::string& tmpl, const Variables& vars) {
    std::string out;
    std::size_t at = 0;
    while (at < tmpl.size()) {
        auto open = tmpl.find("${", at);
        if (open == std::string::npos) break;
        auto close = tmpl.find('}', open + 2);
        if (close == std::string::npos) break;
        out.append(tmpl, at, open - at);
        auto name = tmpl.substr(open + 2, close - open - 2);
        if (auto it = vars.find(name); it != vars.end()) {
            out += it->second.render();
        } else {
            out.append(tmpl, open, close - open + 1);
        }
        at = close + 1;
    }
    out.append(tmpl, at, std::string::npos);
    return out;
}

std::vector<ExecutedEffect> fire_event(ProcessInstance& instance, const std::vector<procdef::ActionBinding>& actions,
                                       procdef::EventType event, const std::string& site) {
    std::vector<ExecutedEffect> done;
    for (const auto& binding : actions) {
        if (binding.event != event) continue;
        ExecutedEffect e{event, site, binding.effect, {}};
        if (const auto* set = std::get_if<procdef::SetVariable>(&binding.effect)) {
            instance.variables[set->name] = TypedValue(set->value);
        } else {
            e.rendered_message = render_template(std::get<procdef::LogMessage>(binding.effect).message_template,
                                                 instance.variables);
        }
        done.push_back(std::move(e));
    }
    return done;
}

} // namespace pubflow::engine
