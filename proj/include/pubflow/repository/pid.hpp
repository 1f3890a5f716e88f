#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pubflow::repository {

struct Pid {
    std::string ns;
    std::uint64_t serial = 0;

    std::string str() const { return ns + ":" + std::to_string(serial); }
    bool operator==(const Pid&) const = default;

    // Throws Error{BAD_REQUEST} unless s is `namespace:serial` with a valid
    // namespace and a positive serial without leading zeros.
    static Pid parse(std::string_view s);
};

// [a-z][a-z0-9]*
bool valid_namespace(std::string_view ns);

} // namespace pubflow::repository
