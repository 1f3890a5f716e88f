#include "pubflow/service/config.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/repository/pid.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>

namespace pubflow::service {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::BAD_REQUEST, "config: " + what); }

template <class T>
T number(const pt::ptree& tree, const std::string& key, T fallback) {
    auto v = tree.get_optional<std::string>(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        auto n = std::stoll(*v, &used);
        if (used != v->size() || n < 0) throw std::invalid_argument(key);
        return static_cast<T>(n);
    } catch (const std::exception&) {
        bad(key + " must be a non-negative integer, got '" + *v + "'");
    }
}

bool flag(const pt::ptree& tree, const std::string& key, bool fallback) {
    auto v = tree.get_optional<std::string>(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    bad(key + " must be true or false");
}

} // namespace

const UserRecord* ServiceConfig::find_user(const std::string& name) const {
    for (const auto& u : users) {
        if (u.name == name) return &u;
    }
    return nullptr;
}

std::vector<std::string> ServiceConfig::actors_with_role(const std::string& role) const {
    std::vector<std::string> out;
    for (const auto& u : users) {
        if (u.roles.count(role)) out.push_back(u.name);
    }
    return out;
}

ServiceConfig load_config(const std::filesystem::path& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        bad(e.what());
    }
    auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    ServiceConfig c;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) {  // a section
            if (!key.starts_with("user:")) bad("unknown section [" + key + "]");
            UserRecord u;
            u.name = key.substr(5);
            if (u.name.empty()) bad("empty user name in [" + key + "]");
            u.password_hash = node.get<std::string>("password", "");
            if (u.password_hash.empty()) bad("[" + key + "] needs password");
            std::vector<std::string> roles;
            auto role_list = node.get<std::string>("roles", "");
            boost::split(roles, role_list, boost::is_any_of(","));
            for (auto& r : roles) {
                boost::trim(r);
                if (r.empty()) continue;
                if (r != "author" && r != "qa" && r != "admin") bad("[" + key + "] has unknown role '" + r + "'");
                u.roles.insert(r);
            }
            if (c.find_user(u.name)) bad("duplicate user '" + u.name + "'");
            c.users.push_back(std::move(u));
            continue;
        }
        const auto& value = node.data();
        if (key == "pidNamespace") c.pid_namespace = value;
        else if (key == "bind") c.bind_address = value;
        else if (key == "port") c.port = number<int>(tree, key, c.port);
        else if (key == "dataDir") c.data_dir = resolve(value);
        else if (key == "stagingTTL") c.staging_ttl = std::chrono::seconds(number<long long>(tree, key, 0));
        else if (key == "sessionTTL") c.session_ttl = std::chrono::seconds(number<long long>(tree, key, 0));
        else if (key == "uploadLimit") c.upload_limit = number<std::uint64_t>(tree, key, 0);
        else if (key == "uiDir") c.ui_dir = value.empty() ? std::filesystem::path() : resolve(value);
        else if (key == "publicUrl") c.public_url = value;
        else if (key == "fsync") c.fsync = flag(tree, key, c.fsync);
        else bad("unknown key '" + key + "'");
    }
    if (!repository::valid_namespace(c.pid_namespace)) bad("pidNamespace must match [a-z][a-z0-9]*");
    if (c.port > 65535) bad("port out of range");
    if (c.upload_limit == 0) bad("uploadLimit must be positive");
    while (!c.public_url.empty() && c.public_url.back() == '/') c.public_url.pop_back();
    return c;
}

} // namespace pubflow::service
