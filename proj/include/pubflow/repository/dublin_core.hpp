#pragma once

#include <json.hpp>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace pubflow::repository {

inline constexpr std::string_view kOaiDcNs = "http://www.openarchives.org/OAI/2.0/oai_dc/";
inline constexpr std::string_view kDcNs = "http://purl.org/dc/elements/1.1/";

// Element names in serialization order.
inline constexpr std::array<std::string_view, 12> kDcElements{
    "title", "creator", "subject", "description", "publisher", "contributor",
    "date",  "type",    "language", "coverage",   "rights",    "identifier"};

bool is_dc_element(std::string_view name);

// Every element is repeatable; an empty list means the element is absent.
struct DublinCoreRecord {
    std::array<std::vector<std::string>, kDcElements.size()> values;

    // Throws Error{UNKNOWN_FIELD} for names outside kDcElements.
    std::vector<std::string>& field(std::string_view name);
    const std::vector<std::string>& field(std::string_view name) const;

    bool operator==(const DublinCoreRecord&) const = default;
};

std::string build_dc_xml(const DublinCoreRecord& record);

// Accepts elements in any order. Errors: XML_SYNTAX, SCHEMA_VIOLATION (wrong
// root, non-DC child, unknown DC element, nested markup).
DublinCoreRecord parse_dc_xml(std::string_view document);

// {"title": [...], ...}; absent keys are empty lists.
nlohmann::json to_json(const DublinCoreRecord& record);
// BAD_REQUEST on non-list values, UNKNOWN_FIELD on unknown keys.
DublinCoreRecord dc_from_json(const nlohmann::json& j);

} // namespace pubflow::repository
