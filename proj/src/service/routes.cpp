#include "pubflow/service/routes.hpp"

namespace pubflow::service {

namespace {

const std::vector<std::string_view> kAny{"author", "qa", "admin"};
const std::vector<std::string_view> kAuthors{"author", "admin"};
const std::vector<std::string_view> kAdmin{"admin"};
const std::vector<std::string_view> kPublic{};

// Schema fragments for the description. Loose JSON-Schema: enough to write a
// client by hand, not meant for validation.
constexpr const char* kTypes = R"json({
  "Error": {"type": "object", "properties": {"code": {"type": "string"}, "message": {"type": "string"}, "detail": {}}},
  "LoginRequest": {"type": "object", "properties": {"username": {"type": "string"}, "password": {"type": "string"}}},
  "Session": {"type": "object", "properties": {"token": {"type": "string"}, "actorId": {"type": "string"},
    "roles": {"type": "array", "items": {"type": "string"}}, "expiresAt": {"type": "string", "format": "date-time"}}},
  "ServiceDescription": {"type": "object", "properties": {"operations": {"type": "array"}, "types": {"type": "object"}}},
  "TypedValue": {"type": "object", "properties": {"type": {"enum": ["string", "integer", "float", "boolean", "bytes"]},
    "value": {"description": "bytes are base64"}}},
  "VariableMap": {"type": "object", "additionalProperties": {"$ref": "TypedValue"}},
  "Variable": {"type": "object", "properties": {"name": {"type": "string"}, "value": {"$ref": "TypedValue"}}},
  "TaskInstance": {"type": "object", "properties": {"taskInstanceId": {"type": "string"}, "instanceId": {"type": "string"},
    "tokenId": {"type": "string"}, "nodeName": {"type": "string"}, "taskName": {"type": "string"}, "actorId": {"type": "string"},
    "state": {"enum": ["open", "completed"]}, "createdAt": {"type": "string"}, "completedAt": {"type": ["string", "null"]}}},
  "TaskList": {"type": "array", "items": {"$ref": "TaskInstance"}},
  "DeploymentSummary": {"type": "object", "properties": {"definitionId": {"type": "string"}, "name": {"type": "string"},
    "version": {"type": "integer"}, "deployedAt": {"type": "string"}}},
  "DeploymentList": {"type": "array", "items": {"$ref": "DeploymentSummary"}},
  "ArchiveUpload": {"description": "multipart/form-data with the zip in field 'archive', or the raw zip as the body"},
  "StartResult": {"type": "object", "properties": {"instance": {"$ref": "ProcessInstance"}, "task": {"$ref": "TaskInstance"}}},
  "CompleteRequest": {"type": "object", "properties": {"transition": {"type": ["string", "null"]}, "variables": {"$ref": "VariableMap"}}},
  "ProcessInstance": {"type": "object", "properties": {"instanceId": {"type": "string"}, "definitionId": {"type": "string"},
    "state": {"enum": ["running", "ended", "stopped"]}, "initiator": {"type": "string"},
    "swimlaneBindings": {"type": "object"}, "variables": {"$ref": "VariableMap"}, "tokens": {"type": "array"},
    "tasks": {"$ref": "TaskList"}, "trail": {"type": "array", "items": {"type": "string"}}}},
  "InstanceList": {"type": "array", "items": {"$ref": "ProcessInstance"}},
  "AdminRequest": {"type": "object", "properties": {"action": {"enum": ["advance", "stop"]}}},
  "GraphState": {"type": "object", "properties": {"definitionId": {"type": "string"},
    "nodes": {"type": "array", "items": {"type": "object", "properties": {"name": {"type": "string"}, "kind": {"type": "string"},
      "x": {"type": "integer"}, "y": {"type": "integer"}, "width": {"type": "integer"}, "height": {"type": "integer"}}}},
    "transitions": {"type": "array", "items": {"type": "object", "properties": {"name": {"type": ["string", "null"]},
      "from": {"type": "string"}, "to": {"type": "string"}}}},
    "currentNodes": {"type": "array", "items": {"type": "string"}}}},
  "StagingUpload": {"description": "multipart/form-data with the file in field 'file'"},
  "StagingRef": {"type": "object", "properties": {"name": {"type": "string"}, "url": {"type": "string"}, "size": {"type": "integer"},
    "mimeType": {"type": "string"}, "uploadedBy": {"type": "string"}, "expiresAt": {"type": "string"}}},
  "Bytes": {"description": "raw content; Content-Type carries the MIME type"},
  "PubFoxml": {"description": "pubfoxml-1.0 XML body; query parameters format and logMessage"},
  "PidResult": {"type": "object", "properties": {"pid": {"type": "string"}}},
  "DigitalObject": {"type": "object", "properties": {"pid": {"type": "string"}, "label": {"type": "string"},
    "contentModel": {"type": "string"}, "state": {"type": "string"}, "cDate": {"type": "string"}, "mDate": {"type": "string"},
    "datastreams": {"type": "object", "additionalProperties": {"type": "object", "properties": {"dsId": {"type": "string"},
      "state": {"enum": ["A", "I", "D"]}, "versions": {"type": "array"}}}}}},
  "DatastreamRequest": {"type": "object", "description": "JSON body, or raw content with the fields as query parameters",
    "properties": {"mode": {"enum": ["byValue", "byReference"]}, "content": {"type": "string", "description": "base64, byValue"},
    "location": {"type": "string", "description": "byReference"}, "altIds": {"type": "array", "items": {"type": "string"}},
    "dsLabel": {"type": "string"}, "versionable": {"type": "boolean"}, "mimeType": {"type": "string"},
    "formatURI": {"type": "string"}, "dsState": {"enum": ["A", "I", "D"]}, "logMessage": {"type": "string"},
    "force": {"type": "boolean"}}},
  "VersionResult": {"type": "object", "properties": {"versionNo": {"type": "integer"}}},
  "SearchRequest": {"type": "object", "properties": {"conditions": {"type": "array", "items": {"type": "object",
    "properties": {"field": {"type": "string"}, "operator": {"enum": ["eq", "has", "gt", "ge", "lt", "le"]},
    "value": {"type": "string"}}}}, "maxResults": {"type": "integer", "minimum": 1}}},
  "SearchResult": {"type": "object", "properties": {"rows": {"type": "array", "items": {"$ref": "ObjectFields"}},
    "complete": {"type": "boolean"}}},
  "ObjectFields": {"type": "object", "description": "pid, label, cDate, mDate as strings; each Dublin Core element as a list of strings"}
})json";

} // namespace

const std::vector<RouteSpec>& route_table() {
    static const std::vector<RouteSpec> table{
        {"login", "POST", "/auth/login", kPublic, "LoginRequest", "Session", "Open a session"},
        {"logout", "POST", "/auth/logout", kAny, "", "", "End the calling session"},
        {"session", "GET", "/auth/session", kAny, "", "Session", "Describe the calling session (token omitted)"},
        {"description", "GET", "/api/description", kPublic, "", "ServiceDescription", "This document"},
        {"listTasks", "GET", "/api/tasks", kAny, "", "TaskList", "Open tasks of the caller, newest first"},
        {"latestDefinitions", "GET", "/api/definitions/latest", kAny, "", "DeploymentList", "Latest version of each definition"},
        {"deployArchive", "POST", "/api/definitions", kAdmin, "ArchiveUpload", "DeploymentSummary", "Deploy a process archive"},
        {"startProcess", "POST", "/api/processes/{definitionId}/start", kAuthors, "", "StartResult",
         "Start an instance with the caller as initiator"},
        {"completeTask", "POST", "/api/tasks/{taskId}/complete", kAny, "CompleteRequest", "ProcessInstance",
         "Write variables and leave the task's node"},
        {"listInstances", "GET", "/api/instances", kAdmin, "", "InstanceList", "All instances"},
        {"getInstance", "GET", "/api/instances/{instanceId}", kAny, "", "ProcessInstance",
         "One instance; participants and admins only"},
        {"getVariables", "GET", "/api/instances/{instanceId}/variables", kAny, "", "VariableMap",
         "All variables; participants and admins only"},
        {"getVariable", "GET", "/api/instances/{instanceId}/variables/{name}", kAny, "", "Variable",
         "One variable; participants and admins only"},
        {"setVariable", "PUT", "/api/instances/{instanceId}/variables/{name}", kAny, "TypedValue", "Variable",
         "Write one variable without completing any task; participants and admins only"},
        {"administerInstance", "POST", "/api/instances/{instanceId}/admin", kAdmin, "AdminRequest", "ProcessInstance",
         "Advance or stop an instance"},
        {"graphState", "GET", "/api/instances/{referent}/graph", kAny, "", "GraphState",
         "Graph of an instance (or of a task's instance) with current nodes"},
        {"uploadStaging", "POST", "/staging", kAny, "StagingUpload", "StagingRef", "Upload a file to the staging area"},
        {"getStaging", "GET", "/staging/{name}", kPublic, "", "Bytes", "Fetch a staged file until it is consumed"},
        {"ingest", "POST", "/repo/objects", kAuthors, "PubFoxml", "PidResult", "Create an object; the repository mints the pid"},
        {"getObject", "GET", "/repo/objects/{pid}", kAny, "", "DigitalObject", "Object properties and datastream versions"},
        {"addDatastream", "POST", "/repo/objects/{pid}/datastreams/{dsId}", kAuthors, "DatastreamRequest", "VersionResult",
         "Create a datastream"},
        {"modifyDatastream", "PUT", "/repo/objects/{pid}/datastreams/{dsId}", kAuthors, "DatastreamRequest", "VersionResult",
         "Add or overwrite a datastream version"},
        {"getDatastream", "GET", "/repo/objects/{pid}/datastreams/{dsId}", kAny, "", "Bytes",
         "Content of the latest or the ?version= version"},
        {"findObjects", "POST", "/repo/search", kAny, "SearchRequest", "SearchResult", "Conjunctive field search"},
    };
    return table;
}

const nlohmann::json& service_description() {
    static const nlohmann::json doc = [] {
        nlohmann::json ops = nlohmann::json::array();
        for (const auto& r : route_table()) {
            nlohmann::json roles = nlohmann::json::array();
            for (auto role : r.roles) roles.push_back(role);
            ops.push_back({{"name", r.name},
                           {"method", r.method},
                           {"path", r.path},
                           {"roles", roles},
                           {"request", r.request.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.request)},
                           {"response", r.response.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.response)},
                           {"summary", r.summary}});
        }
        return nlohmann::json{{"service", "pubflow"},
                              {"version", 1},
                              {"authentication", "Authorization: Bearer <token from login>"},
                              {"errors", "Error body with HTTP status per docs/wire.md"},
                              {"operations", std::move(ops)},
                              {"types", nlohmann::json::parse(kTypes)}};
    }();
    return doc;
}

int http_status(Errc code) {
    switch (code) {
    case Errc::BAD_REQUEST:
    case Errc::XML_SYNTAX:
    case Errc::SCHEMA_VIOLATION:
    case Errc::MALFORMED_ZIP:
    case Errc::MISSING_DEFINITION:
    case Errc::UNSUPPORTED_FORMAT:
    case Errc::UNKNOWN_FIELD:
    case Errc::UNSUPPORTED_OPERATOR:
        return 400;
    case Errc::BAD_CREDENTIALS:
    case Errc::UNAUTHENTICATED:
        return 401;
    case Errc::FORBIDDEN:
    case Errc::FORBIDDEN_ACTOR:
        return 403;
    case Errc::UNKNOWN_DEFINITION:
    case Errc::UNKNOWN_INSTANCE:
    case Errc::UNKNOWN_VARIABLE:
    case Errc::UNKNOWN_REFERENT:
    case Errc::UNKNOWN_PID:
    case Errc::UNKNOWN_DATASTREAM:
    case Errc::UNKNOWN_VERSION:
    case Errc::NOT_FOUND:
        return 404;
    case Errc::TASK_NOT_OPEN:
    case Errc::INSTANCE_NOT_RUNNING:
    case Errc::DATASTREAM_EXISTS:
    case Errc::STATE_CONFLICT:
        return 409;
    case Errc::PAYLOAD_TOO_LARGE:
        return 413;
    case Errc::VALIDATION_FAILED:
    case Errc::UNSOUND_DEFINITION:
    case Errc::UNKNOWN_TRANSITION:
    case Errc::NO_DEFAULT_TRANSITION:
    case Errc::NO_ACTOR_FOR_ROLE:
    case Errc::EXECUTION_LIMIT:
    case Errc::UNRESOLVABLE_LOCATION:
        return 422;
    case Errc::IO_ERROR:
    case Errc::CORRUPT_JOURNAL:
        return 500;
    }
    return 500;
}

nlohmann::json error_body(const Error& e) {
    nlohmann::json body{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (!e.detail().is_null()) body["detail"] = e.detail();
    return body;
}

std::string path_regex(std::string_view path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] == '{') {
            i = path.find('}', i);
            out += "([^/]+)";
        } else {
            out += path[i];
        }
    }
    return out;
}

} // namespace pubflow::service
