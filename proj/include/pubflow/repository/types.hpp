#pragma once

#include "pubflow/common/codec.hpp"
#include "pubflow/repository/dublin_core.hpp"
#include "pubflow/repository/pid.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pubflow::repository {

enum class ObjectState { active, inactive, deleted };
enum class DatastreamState { A, I, D };
enum class ControlMode { inline_content, referenced };
enum class SourceMode { by_value, by_reference };

std::string_view to_string(ObjectState s);
std::string_view to_string(DatastreamState s);
std::string_view to_string(ControlMode m);
// BAD_REQUEST on unknown names.
DatastreamState datastream_state_from(std::string_view s);
SourceMode source_mode_from(std::string_view s);

// One stored version. Content always lives in the blob store; referenced
// versions also remember where the copy was fetched from.
struct DatastreamVersion {
    std::uint64_t version_no = 0;
    std::optional<std::string> label;
    std::string mime_type;
    std::optional<std::string> format_uri;
    ControlMode control_mode = ControlMode::inline_content;
    std::optional<std::string> location;
    std::string digest;  // sha256 of the content
    std::uint64_t size = 0;
    std::vector<std::string> alt_ids;
    std::string log_message;
    Timestamp created_at{};

    bool operator==(const DatastreamVersion&) const = default;
};

struct Datastream {
    std::string ds_id;
    std::vector<DatastreamVersion> versions;
    DatastreamState state = DatastreamState::A;

    const DatastreamVersion& latest() const { return versions.back(); }
    bool operator==(const Datastream&) const = default;
};

struct DigitalObject {
    Pid pid;
    std::string label;
    std::string content_model;
    ObjectState state = ObjectState::active;
    Timestamp created_at{};
    Timestamp modified_at{};
    std::map<std::string, Datastream> datastreams;

    bool operator==(const DigitalObject&) const = default;
};

struct DatastreamContent {
    DatastreamVersion version;
    Bytes content;
};

// Properties for add/modify. Unset optionals inherit from the previous version
// on modify.
struct DatastreamProps {
    std::optional<std::vector<std::string>> alt_ids;
    std::optional<std::string> label;
    bool versionable = true;
    std::optional<std::string> mime_type;
    std::optional<std::string> format_uri;
};

struct DatastreamSource {
    SourceMode mode = SourceMode::by_value;
    std::optional<Bytes> content;         // by_value; unset keeps the previous content on modify
    std::optional<std::string> location;  // by_reference
};

enum class SearchOperator { eq, has, gt, ge, lt, le };
std::string_view to_string(SearchOperator op);

struct SearchCondition {
    std::string field;
    SearchOperator op = SearchOperator::eq;
    std::string value;
};

struct ObjectFields {
    std::string pid;
    std::string label;
    std::string c_date;
    std::string m_date;
    DublinCoreRecord dc;
};

struct FieldSearchResult {
    std::vector<ObjectFields> rows;
    bool complete = true;
};

inline constexpr std::array<std::string_view, 4> kObjectSearchFields{"pid", "label", "cDate", "mDate"};

// Wire shapes. Keys are camelCase.
nlohmann::json to_json(const DatastreamVersion& v);
nlohmann::json to_json(const Datastream& ds);
nlohmann::json to_json(const DigitalObject& o);
nlohmann::json to_json(const ObjectFields& f);
nlohmann::json to_json(const FieldSearchResult& r);
DatastreamVersion version_from_json(const nlohmann::json& j);
DigitalObject object_from_json(const nlohmann::json& j);
// UNKNOWN_FIELD / UNSUPPORTED_OPERATOR / BAD_REQUEST.
SearchCondition condition_from_json(const nlohmann::json& j);

} // namespace pubflow::repository
