#pragma once

#include "pubflow/common/codec.hpp"
#include "pubflow/common/zip.hpp"
#include "pubflow/procdef/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pubflow::procdef {

inline constexpr std::string_view kDefinitionEntry = "processdefinition.xml";
inline constexpr std::string_view kLayoutEntry = "layout.xml";
inline constexpr std::string_view kImageEntry = "processimage.png";

// An archive entry that is carried along but never interpreted. The payload
// stays in its stored (possibly compressed) form until read() is called.
struct Attachment {
    zip::EntryInfo entry;
    Bytes stored;

    const std::string& name() const { return entry.name; }
    // Throws Error{MALFORMED_ZIP} when the stored payload is damaged.
    Bytes read() const { return zip::decode(entry, stored); }
};

struct ParsedArchive {
    ProcessDefinition definition;
    std::optional<LayoutMetadata> layout;
    std::optional<Bytes> image;
    std::vector<Attachment> attachments;
};

// Errors: MALFORMED_ZIP, MISSING_DEFINITION, XML_SYNTAX, SCHEMA_VIOLATION.
// A layout naming a node absent from the definition is a SCHEMA_VIOLATION.
ParsedArchive parse_archive(std::span<const std::uint8_t> archive);

struct ArchiveContents {
    ProcessDefinition definition;
    std::optional<LayoutMetadata> layout;
    std::optional<Bytes> image;
    std::vector<std::pair<std::string, Bytes>> attachments;
};

Bytes build_archive(const ArchiveContents& contents);

} // namespace pubflow::procdef
