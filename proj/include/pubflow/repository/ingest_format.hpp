#pragma once

#include "pubflow/common/codec.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pubflow::repository {

inline constexpr std::string_view kIngestFormat = "pubfoxml-1.0";
inline constexpr std::string_view kIngestNs = "urn:pubflow:foxml-1";

struct IngestDatastream {
    std::string id;
    std::optional<std::string> mime_type;
    Bytes content;

    bool operator==(const IngestDatastream&) const = default;
};

struct IngestObject {
    std::string label;
    std::string content_model;
    std::vector<IngestDatastream> datastreams;

    bool operator==(const IngestObject&) const = default;
};

std::string build_ingest_xml(const IngestObject& object);

// Errors: XML_SYNTAX; SCHEMA_VIOLATION for a pid attribute, a DC datastream
// (the repository creates DC itself), duplicate or malformed datastream ids,
// or invalid base64 content.
IngestObject parse_ingest_xml(std::string_view document);

// [A-Za-z][A-Za-z0-9._-]*, at most 64 characters.
bool valid_datastream_id(std::string_view id);

} // namespace pubflow::repository
