#include "pubflow/repository/ingest_format.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/common/xml.hpp"

#include <set>

namespace pubflow::repository {

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& message) {
    throw Error(Errc::SCHEMA_VIOLATION, message, {{"path", path}, {"message", message}});
}

bool only_space(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

} // namespace

bool valid_datastream_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
    if (!alpha(id[0])) return false;
    for (char c : id) {
        if (!alpha(c) && !(c >= '0' && c <= '9') && c != '.' && c != '_' && c != '-') return false;
    }
    return true;
}

std::string build_ingest_xml(const IngestObject& object) {
    xml::Writer w;
    w.open("object", {{"xmlns", std::string(kIngestNs)}, {"label", object.label}, {"contentModel", object.content_model}});
    for (const auto& ds : object.datastreams) {
        xml::Writer::Attributes attrs{{"id", ds.id}};
        if (ds.mime_type) attrs.emplace_back("mimeType", *ds.mime_type);
        w.leaf("datastream", base64_encode(ds.content), attrs);
    }
    return w.str();
}

IngestObject parse_ingest_xml(std::string_view document) {
    auto root = xml::parse(document);
    if (!root.is(kIngestNs, "object")) schema("/", "root element must be object in " + std::string(kIngestNs));
    if (root.attr("pid")) schema("/object/@pid", "pid is minted by the repository and must not be supplied");
    IngestObject out;
    for (const auto& [key, value] : root.attributes) {
        if (key == "label") out.label = value;
        else if (key == "contentModel") out.content_model = value;
        else if (key.find(' ') == std::string::npos) schema("/object/@" + key, "unknown attribute '" + key + "'");
    }
    if (!root.attr("label")) schema("/object/@label", "label is required");
    if (!root.attr("contentModel")) schema("/object/@contentModel", "contentModel is required");
    if (!only_space(root.text)) schema("/object", "unexpected text");

    std::set<std::string> seen;
    for (std::size_t i = 0; i < root.children.size(); ++i) {
        const auto& child = root.children[i];
        std::string path = "/object/" + child.name + "[" + std::to_string(i + 1) + "]";
        if (!child.is(kIngestNs, "datastream")) schema(path, "unexpected element '" + child.name + "'");
        IngestDatastream ds;
        const auto* id = child.attr("id");
        if (!id || !valid_datastream_id(*id)) schema(path + "/@id", "missing or malformed datastream id");
        if (*id == "DC") schema(path + "/@id", "DC is created by the repository; set it with a modify call");
        if (!seen.insert(*id).second) schema(path + "/@id", "duplicate datastream id '" + *id + "'");
        ds.id = *id;
        if (const auto* m = child.attr("mimeType")) ds.mime_type = *m;
        if (!child.children.empty()) schema(path, "datastream content must be base64 text");
        try {
            ds.content = base64_decode(child.text);
        } catch (const Error&) {
            schema(path, "datastream content is not valid base64");
        }
        out.datastreams.push_back(std::move(ds));
    }
    return out;
}

} // namespace pubflow::repository
