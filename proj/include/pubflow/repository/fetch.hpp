#pragma once

#include "pubflow/common/codec.hpp"

#include <chrono>
#include <optional>
#include <string>

namespace pubflow::repository {

struct Fetched {
    Bytes content;
    std::optional<std::string> content_type;  // as reported by the transport, parameters stripped
};

// Resolves by-reference locations. Failures throw Error{UNRESOLVABLE_LOCATION}.
class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual Fetched get(const std::string& location) = 0;
    // Content type the transport would report, without transferring the body.
    virtual std::optional<std::string> content_type(const std::string& location) = 0;
};

// http:// via a plain HTTP client, file:// from the local file system.
class DefaultFetcher : public Fetcher {
public:
    explicit DefaultFetcher(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
    Fetched get(const std::string& location) override;
    std::optional<std::string> content_type(const std::string& location) override;

private:
    std::chrono::seconds timeout_;
};

} // namespace pubflow::repository
