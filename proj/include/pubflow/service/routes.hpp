#pragma once

#include "pubflow/common/error.hpp"

#include <json.hpp>

#include <string_view>
#include <vector>

namespace pubflow::service {

struct RouteSpec {
    std::string_view name;
    std::string_view method;
    std::string_view path;  // {param} marks a path segment
    std::vector<std::string_view> roles;  // empty: no session needed
    std::string_view request;   // type name in the description, "" for none
    std::string_view response;
    std::string_view summary;

    bool is_public() const { return roles.empty(); }
};

// Every endpoint exactly once. Order is the description order.
const std::vector<RouteSpec>& route_table();

// The document served at GET /api/description. Deterministic.
const nlohmann::json& service_description();

int http_status(Errc code);
nlohmann::json error_body(const Error& e);

// "/api/tasks/{id}/complete" -> "/api/tasks/([^/]+)/complete"
std::string path_regex(std::string_view path);

} // namespace pubflow::service
