#include "pubflow/repository/dublin_core.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/common/xml.hpp"

#include <algorithm>

namespace pubflow::repository {

namespace {

std::size_t index_of(std::string_view name) {
    auto it = std::find(kDcElements.begin(), kDcElements.end(), name);
    if (it == kDcElements.end()) throw Error(Errc::UNKNOWN_FIELD, "unknown Dublin Core element '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - kDcElements.begin());
}

[[noreturn]] void schema(const std::string& path, const std::string& message) {
    throw Error(Errc::SCHEMA_VIOLATION, message, {{"path", path}, {"message", message}});
}

} // namespace

bool is_dc_element(std::string_view name) {
    return std::find(kDcElements.begin(), kDcElements.end(), name) != kDcElements.end();
}

std::vector<std::string>& DublinCoreRecord::field(std::string_view name) { return values[index_of(name)]; }

const std::vector<std::string>& DublinCoreRecord::field(std::string_view name) const { return values[index_of(name)]; }

std::string build_dc_xml(const DublinCoreRecord& record) {
    xml::Writer w;
    w.open("oai_dc:dc", {{"xmlns:oai_dc", std::string(kOaiDcNs)}, {"xmlns:dc", std::string(kDcNs)}});
    for (std::size_t i = 0; i < kDcElements.size(); ++i) {
        for (const auto& v : record.values[i]) w.leaf("dc:" + std::string(kDcElements[i]), v);
    }
    return w.str();
}

DublinCoreRecord parse_dc_xml(std::string_view document) {
    auto root = xml::parse(document);
    if (!root.is(kOaiDcNs, "dc")) schema("/", "root element must be oai_dc:dc");
    DublinCoreRecord out;
    for (const auto& child : root.children) {
        std::string path = "/dc/" + child.name;
        if (child.ns != kDcNs) schema(path, "element outside the Dublin Core namespace");
        if (!is_dc_element(child.name)) schema(path, "unsupported Dublin Core element '" + child.name + "'");
        if (!child.children.empty()) schema(path, "Dublin Core values are plain text");
        out.field(child.name).push_back(child.text);
    }
    return out;
}

nlohmann::json to_json(const DublinCoreRecord& record) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < kDcElements.size(); ++i) j[std::string(kDcElements[i])] = record.values[i];
    return j;
}

DublinCoreRecord dc_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::BAD_REQUEST, "Dublin Core fields must be an object");
    DublinCoreRecord out;
    for (const auto& [key, value] : j.items()) {
        auto& slot = out.field(key);
        if (value.is_string()) {
            slot.push_back(value.get<std::string>());
            continue;
        }
        if (!value.is_array()) throw Error(Errc::BAD_REQUEST, "field '" + key + "' must be a string or a list of strings");
        for (const auto& v : value) {
            if (!v.is_string()) throw Error(Errc::BAD_REQUEST, "field '" + key + "' must hold strings");
            slot.push_back(v.get<std::string>());
        }
    }
    return out;
}

} // namespace pubflow::repository
