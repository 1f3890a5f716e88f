#include "pubflow/procdef/archive.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/procdef/xml_format.hpp"

namespace pubflow::procdef {

ParsedArchive parse_archive(std::span<const std::uint8_t> archive) {
    zip::Reader reader(archive);

    const auto* def_entry = reader.find(kDefinitionEntry);
    if (!def_entry) {
        throw Error(Errc::MISSING_DEFINITION, "process archive has no " + std::string(kDefinitionEntry));
    }

    ParsedArchive out;
    out.definition = parse_definition_xml(as_chars(reader.read(*def_entry)));

    if (const auto* layout_entry = reader.find(kLayoutEntry)) {
        auto layout = parse_layout_xml(as_chars(reader.read(*layout_entry)));
        for (const auto& [node, geometry] : layout.per_node) {
            if (!out.definition.find_node(node)) {
                std::string path = "/layout/node[@name='" + node + "']";
                throw Error(Errc::SCHEMA_VIOLATION, "layout references unknown node '" + node + "'",
                            {{"path", path}, {"message", "no such node in " + std::string(kDefinitionEntry)}});
            }
        }
        out.layout = std::move(layout);
    }
    if (const auto* image_entry = reader.find(kImageEntry)) {
        out.image = reader.read(*image_entry);
    }

    for (const auto& e : reader.entries()) {
        if (e.name == kDefinitionEntry || e.name == kLayoutEntry || e.name == kImageEntry) continue;
        if (!e.name.empty() && e.name.back() == '/') continue;  // directory marker
        auto raw = reader.raw(e);
        out.attachments.push_back({e, Bytes(raw.begin(), raw.end())});
    }
    return out;
}

Bytes build_archive(const ArchiveContents& contents) {
    zip::Writer w;
    w.add(std::string(kDefinitionEntry), serialize_definition_xml(contents.definition));
    if (contents.layout) w.add(std::string(kLayoutEntry), serialize_layout_xml(*contents.layout));
    if (contents.image) w.add(std::string(kImageEntry), std::span<const std::uint8_t>(*contents.image), zip::Method::stored);
    for (const auto& [name, bytes] : contents.attachments) w.add(name, std::span<const std::uint8_t>(bytes));
    return w.finish();
}

} // namespace pubflow::procdef
