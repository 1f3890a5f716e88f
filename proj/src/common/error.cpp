#include "pubflow/common/error.hpp"

#include <array>
#include <utility>

namespace pubflow {

namespace {

#define PUBFLOW_ERRC(name) std::pair<Errc, std::string_view>{Errc::name, #name}

constexpr std::array kNames = {
    PUBFLOW_ERRC(MALFORMED_ZIP),
    PUBFLOW_ERRC(MISSING_DEFINITION),
    PUBFLOW_ERRC(XML_SYNTAX),
    PUBFLOW_ERRC(SCHEMA_VIOLATION),
    PUBFLOW_ERRC(VALIDATION_FAILED),
    PUBFLOW_ERRC(UNSOUND_DEFINITION),
    PUBFLOW_ERRC(UNKNOWN_DEFINITION),
    PUBFLOW_ERRC(UNKNOWN_INSTANCE),
    PUBFLOW_ERRC(UNKNOWN_VARIABLE),
    PUBFLOW_ERRC(UNKNOWN_REFERENT),
    PUBFLOW_ERRC(TASK_NOT_OPEN),
    PUBFLOW_ERRC(FORBIDDEN_ACTOR),
    PUBFLOW_ERRC(UNKNOWN_TRANSITION),
    PUBFLOW_ERRC(NO_DEFAULT_TRANSITION),
    PUBFLOW_ERRC(INSTANCE_NOT_RUNNING),
    PUBFLOW_ERRC(NO_ACTOR_FOR_ROLE),
    PUBFLOW_ERRC(EXECUTION_LIMIT),
    PUBFLOW_ERRC(UNSUPPORTED_FORMAT),
    PUBFLOW_ERRC(UNKNOWN_PID),
    PUBFLOW_ERRC(UNKNOWN_DATASTREAM),
    PUBFLOW_ERRC(UNKNOWN_VERSION),
    PUBFLOW_ERRC(DATASTREAM_EXISTS),
    PUBFLOW_ERRC(UNRESOLVABLE_LOCATION),
    PUBFLOW_ERRC(STATE_CONFLICT),
    PUBFLOW_ERRC(UNKNOWN_FIELD),
    PUBFLOW_ERRC(UNSUPPORTED_OPERATOR),
    PUBFLOW_ERRC(BAD_CREDENTIALS),
    PUBFLOW_ERRC(UNAUTHENTICATED),
    PUBFLOW_ERRC(FORBIDDEN),
    PUBFLOW_ERRC(PAYLOAD_TOO_LARGE),
    PUBFLOW_ERRC(BAD_REQUEST),
    PUBFLOW_ERRC(NOT_FOUND),
    PUBFLOW_ERRC(IO_ERROR),
    PUBFLOW_ERRC(CORRUPT_JOURNAL),
};

#undef PUBFLOW_ERRC

} // namespace

std::string_view to_string(Errc code) noexcept {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "UNKNOWN_ERROR";
}

bool errc_from_string(std::string_view name, Errc& out) noexcept {
    for (const auto& [c, n] : kNames) {
        if (n == name) {
            out = c;
            return true;
        }
    }
    return false;
}

} // namespace pubflow
