#include "pubflow/repository/fetch.hpp"

#include "pubflow/common/error.hpp"

#include <httplib.h>

#include <fstream>
#include <iterator>

namespace pubflow::repository {

namespace {

[[noreturn]] void unresolvable(const std::string& location, const std::string& why) {
    throw Error(Errc::UNRESOLVABLE_LOCATION, "cannot resolve '" + location + "': " + why, {{"location", location}});
}

struct HttpTarget {
    std::string origin;  // http://host:port
    std::string path;    // /path?query
};

HttpTarget split_http(const std::string& location) {
    constexpr std::string_view scheme = "http://";
    auto rest = std::string_view(location).substr(scheme.size());
    auto slash = rest.find('/');
    HttpTarget t;
    t.origin = std::string(scheme) + std::string(rest.substr(0, slash));
    t.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    if (auto hash = t.path.find('#'); hash != std::string::npos) t.path.resize(hash);
    if (t.origin.size() == scheme.size()) unresolvable(location, "missing host");
    return t;
}

std::string percent_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
            out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

std::optional<std::string> media_type(const httplib::Response& res) {
    if (!res.has_header("Content-Type")) return std::nullopt;
    auto v = res.get_header_value("Content-Type");
    if (auto semi = v.find(';'); semi != std::string::npos) v.resize(semi);
    while (!v.empty() && v.back() == ' ') v.pop_back();
    if (v.empty()) return std::nullopt;
    return v;
}

bool is_http(const std::string& location) { return location.rfind("http://", 0) == 0; }
bool is_file(const std::string& location) { return location.rfind("file://", 0) == 0; }

} // namespace

Fetched DefaultFetcher::get(const std::string& location) {
    if (is_file(location)) {
        auto path = percent_decode(std::string_view(location).substr(7));
        std::ifstream in(path, std::ios::binary);
        if (!in) unresolvable(location, "no such file");
        return {Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()), std::nullopt};
    }
    if (!is_http(location)) unresolvable(location, "unsupported scheme");
    auto target = split_http(location);
    httplib::Client cli(target.origin);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    auto res = cli.Get(target.path);
    if (!res) unresolvable(location, httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) unresolvable(location, "HTTP status " + std::to_string(res->status));
    return {to_bytes(res->body), media_type(*res)};
}

std::optional<std::string> DefaultFetcher::content_type(const std::string& location) {
    if (!is_http(location)) return std::nullopt;
    auto target = split_http(location);
    httplib::Client cli(target.origin);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    auto res = cli.Head(target.path);
    if (!res || res->status < 200 || res->status >= 300) return std::nullopt;
    return media_type(*res);
}

} // namespace pubflow::repository
