#pragma once

#include "pubflow/procdef/model.hpp"

#include <string>
#include <string_view>

namespace pubflow::procdef {

// Parses processdefinition.xml. Throws Error{XML_SYNTAX} (detail: line,
// column) or Error{SCHEMA_VIOLATION} (detail: path, message). Structural
// invariants such as unique names are left to validate_definition.
ProcessDefinition parse_definition_xml(std::string_view xml);
std::string serialize_definition_xml(const ProcessDefinition& def);

// Parses layout.xml. Same error contract.
LayoutMetadata parse_layout_xml(std::string_view xml);
std::string serialize_layout_xml(const LayoutMetadata& layout);

} // namespace pubflow::procdef
