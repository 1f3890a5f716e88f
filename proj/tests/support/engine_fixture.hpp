#pragma once

#include "pubflow/engine/engine.hpp"
#include "pubflow/procdef/xml_format.hpp"
#include "support/fixtures.hpp"

#include <map>
#include <memory>

namespace pubflow::testing {

// Role table used by engine tests: bob and quinn are both qa, so role
// swimlanes bind to bob.
inline engine::RoleResolver test_roles() {
    return [](const std::string& role) -> std::vector<std::string> {
        static const std::map<std::string, std::vector<std::string>> table{
            {"author", {"alice", "dave"}}, {"qa", {"quinn", "bob"}}, {"admin", {"root"}}};
        auto it = table.find(role);
        return it == table.end() ? std::vector<std::string>{} : it->second;
    };
}

inline std::unique_ptr<engine::Engine> open_engine(const std::filesystem::path& dir, std::uint64_t snapshot_every = 1000) {
    engine::Engine::Options o;
    o.data_dir = dir;
    o.journal.snapshot_every = snapshot_every;
    o.actors_with_role = test_roles();
    return std::make_unique<engine::Engine>(std::move(o));
}

inline procdef::ProcessDefinition fixture_definition(const std::string& name) {
    return procdef::parse_definition_xml(fixture(name));
}

} // namespace pubflow::testing
