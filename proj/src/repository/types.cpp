#include "pubflow/repository/types.hpp"

#include "pubflow/common/error.hpp"

#include <algorithm>

namespace pubflow::repository {

using nlohmann::json;

namespace {

json optional_str(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
}

ObjectState object_state_from(std::string_view s) {
    if (s == "active") return ObjectState::active;
    if (s == "inactive") return ObjectState::inactive;
    if (s == "deleted") return ObjectState::deleted;
    throw Error(Errc::BAD_REQUEST, "unknown object state '" + std::string(s) + "'");
}

} // namespace

std::string_view to_string(ObjectState s) {
    switch (s) {
    case ObjectState::active: return "active";
    case ObjectState::inactive: return "inactive";
    case ObjectState::deleted: return "deleted";
    }
    return "active";
}

std::string_view to_string(DatastreamState s) {
    switch (s) {
    case DatastreamState::A: return "A";
    case DatastreamState::I: return "I";
    case DatastreamState::D: return "D";
    }
    return "A";
}

std::string_view to_string(ControlMode m) { return m == ControlMode::inline_content ? "inline" : "referenced"; }

DatastreamState datastream_state_from(std::string_view s) {
    if (s == "A") return DatastreamState::A;
    if (s == "I") return DatastreamState::I;
    if (s == "D") return DatastreamState::D;
    throw Error(Errc::BAD_REQUEST, "datastream state must be A, I or D, not '" + std::string(s) + "'");
}

SourceMode source_mode_from(std::string_view s) {
    if (s == "byValue") return SourceMode::by_value;
    if (s == "byReference") return SourceMode::by_reference;
    throw Error(Errc::BAD_REQUEST, "mode must be byValue or byReference, not '" + std::string(s) + "'");
}

std::string_view to_string(SearchOperator op) {
    switch (op) {
    case SearchOperator::eq: return "eq";
    case SearchOperator::has: return "has";
    case SearchOperator::gt: return "gt";
    case SearchOperator::ge: return "ge";
    case SearchOperator::lt: return "lt";
    case SearchOperator::le: return "le";
    }
    return "eq";
}

json to_json(const DatastreamVersion& v) {
    return {{"versionNo", v.version_no},
            {"label", optional_str(v.label)},
            {"mimeType", v.mime_type},
            {"formatURI", optional_str(v.format_uri)},
            {"controlMode", std::string(to_string(v.control_mode))},
            {"location", optional_str(v.location)},
            {"digest", v.digest},
            {"size", v.size},
            {"altIds", v.alt_ids},
            {"logMessage", v.log_message},
            {"createdAt", format_iso8601(v.created_at)}};
}

DatastreamVersion version_from_json(const json& j) {
    DatastreamVersion v;
    v.version_no = j.at("versionNo").get<std::uint64_t>();
    v.label = read_optional(j, "label");
    v.mime_type = j.at("mimeType").get<std::string>();
    v.format_uri = read_optional(j, "formatURI");
    v.control_mode = j.at("controlMode") == "inline" ? ControlMode::inline_content : ControlMode::referenced;
    v.location = read_optional(j, "location");
    v.digest = j.at("digest").get<std::string>();
    v.size = j.at("size").get<std::uint64_t>();
    v.alt_ids = j.at("altIds").get<std::vector<std::string>>();
    v.log_message = j.at("logMessage").get<std::string>();
    v.created_at = parse_iso8601(j.at("createdAt").get<std::string>());
    return v;
}

json to_json(const Datastream& ds) {
    json versions = json::array();
    for (const auto& v : ds.versions) versions.push_back(to_json(v));
    return {{"dsId", ds.ds_id}, {"state", std::string(to_string(ds.state))}, {"versions", std::move(versions)}};
}

json to_json(const DigitalObject& o) {
    json dss = json::object();
    for (const auto& [id, ds] : o.datastreams) dss[id] = to_json(ds);
    return {{"pid", o.pid.str()},
            {"label", o.label},
            {"contentModel", o.content_model},
            {"state", std::string(to_string(o.state))},
            {"cDate", format_iso8601(o.created_at)},
            {"mDate", format_iso8601(o.modified_at)},
            {"datastreams", std::move(dss)}};
}

DigitalObject object_from_json(const json& j) {
    DigitalObject o;
    o.pid = Pid::parse(j.at("pid").get<std::string>());
    o.label = j.at("label").get<std::string>();
    o.content_model = j.at("contentModel").get<std::string>();
    o.state = object_state_from(j.at("state").get<std::string>());
    o.created_at = parse_iso8601(j.at("cDate").get<std::string>());
    o.modified_at = parse_iso8601(j.at("mDate").get<std::string>());
    for (const auto& [id, ds] : j.at("datastreams").items()) {
        Datastream d;
        d.ds_id = id;
        d.state = datastream_state_from(ds.at("state").get<std::string>());
        for (const auto& v : ds.at("versions")) d.versions.push_back(version_from_json(v));
        o.datastreams.emplace(id, std::move(d));
    }
    return o;
}

json to_json(const ObjectFields& f) {
    json j = to_json(f.dc);
    j["pid"] = f.pid;
    j["label"] = f.label;
    j["cDate"] = f.c_date;
    j["mDate"] = f.m_date;
    return j;
}

json to_json(const FieldSearchResult& r) {
    json rows = json::array();
    for (const auto& f : r.rows) rows.push_back(to_json(f));
    return {{"rows", std::move(rows)}, {"complete", r.complete}};
}

SearchCondition condition_from_json(const json& j) {
    if (!j.is_object() || !j.contains("field") || !j.contains("operator") || !j.contains("value") ||
        !j["field"].is_string() || !j["operator"].is_string() || !j["value"].is_string()) {
        throw Error(Errc::BAD_REQUEST, "a condition is {\"field\", \"operator\", \"value\"} with string members");
    }
    SearchCondition c;
    c.field = j["field"].get<std::string>();
    if (!is_dc_element(c.field) &&
        std::find(kObjectSearchFields.begin(), kObjectSearchFields.end(), c.field) == kObjectSearchFields.end()) {
        throw Error(Errc::UNKNOWN_FIELD, "unknown search field '" + c.field + "'");
    }
    const auto& op = j["operator"].get_ref<const std::string&>();
    bool found = false;
    for (auto candidate : {SearchOperator::eq, SearchOperator::has, SearchOperator::gt, SearchOperator::ge,
                           SearchOperator::lt, SearchOperator::le}) {
        if (to_string(candidate) == op) {
            c.op = candidate;
            found = true;
        }
    }
    if (!found) throw Error(Errc::UNSUPPORTED_OPERATOR, "unsupported operator '" + op + "'");
    c.value = j["value"].get<std::string>();
    return c;
}

} // namespace pubflow::repository
