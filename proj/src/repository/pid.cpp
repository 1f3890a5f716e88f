#include "pubflow/repository/pid.hpp"

#include "pubflow/common/error.hpp"

#include <charconv>

namespace pubflow::repository {

bool valid_namespace(std::string_view ns) {
    if (ns.empty() || ns[0] < 'a' || ns[0] > 'z') return false;
    for (char c : ns) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
    }
    return true;
}

Pid Pid::parse(std::string_view s) {
    auto bad = [&] { return Error(Errc::BAD_REQUEST, "malformed pid '" + std::string(s) + "'"); };
    auto colon = s.find(':');
    if (colon == std::string_view::npos) throw bad();
    auto ns = s.substr(0, colon);
    auto digits = s.substr(colon + 1);
    if (!valid_namespace(ns) || digits.empty() || digits[0] == '0') throw bad();
    Pid p{std::string(ns), 0};
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p.serial);
    if (ec != std::errc() || end != digits.data() + digits.size()) throw bad();
    return p;
}

} // namespace pubflow::repository
