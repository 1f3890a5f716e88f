#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace pubflow {

// Every failure that crosses a module boundary carries one of these codes.
// The wire protocol transmits the code name verbatim.
enum class Errc {
    // archive / definition parsing
    MALFORMED_ZIP,
    MISSING_DEFINITION,
    XML_SYNTAX,
    SCHEMA_VIOLATION,
    // engine
    VALIDATION_FAILED,
    UNSOUND_DEFINITION,
    UNKNOWN_DEFINITION,
    UNKNOWN_INSTANCE,
    UNKNOWN_VARIABLE,
    UNKNOWN_REFERENT,
    TASK_NOT_OPEN,
    FORBIDDEN_ACTOR,
    UNKNOWN_TRANSITION,
    NO_DEFAULT_TRANSITION,
    INSTANCE_NOT_RUNNING,
    NO_ACTOR_FOR_ROLE,
    EXECUTION_LIMIT,
    // repository
    UNSUPPORTED_FORMAT,
    UNKNOWN_PID,
    UNKNOWN_DATASTREAM,
    UNKNOWN_VERSION,
    DATASTREAM_EXISTS,
    UNRESOLVABLE_LOCATION,
    STATE_CONFLICT,
    UNKNOWN_FIELD,
    UNSUPPORTED_OPERATOR,
    // service
    BAD_CREDENTIALS,
    UNAUTHENTICATED,
    FORBIDDEN,
    PAYLOAD_TOO_LARGE,
    BAD_REQUEST,
    NOT_FOUND,
    // storage
    IO_ERROR,
    CORRUPT_JOURNAL,
};

std::string_view to_string(Errc code) noexcept;
bool errc_from_string(std::string_view name, Errc& out) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, nlohmann::json detail = nullptr)
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    Errc code() const noexcept { return code_; }
    const nlohmann::json& detail() const noexcept { return detail_; }

private:
    Errc code_;
    nlohmann::json detail_;
};

} // namespace pubflow
