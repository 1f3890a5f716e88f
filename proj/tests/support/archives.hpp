#pragma once

#include "pubflow/procdef/archive.hpp"
#include "pubflow/procdef/xml_format.hpp"
#include "support/fixtures.hpp"

#include <fstream>

namespace pubflow::testing {

// Packs a definition fixture into a process archive and writes it to `out`.
inline std::filesystem::path write_archive(const std::string& definition_fixture, const std::filesystem::path& out) {
    procdef::ArchiveContents contents;
    contents.definition = procdef::parse_definition_xml(fixture(definition_fixture));
    auto bytes = procdef::build_archive(contents);
    std::ofstream(out, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                               static_cast<std::streamsize>(bytes.size()));
    return out;
}

} // namespace pubflow::testing
