#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace pubflow::service {

struct UserRecord {
    std::string name;
    std::string password_hash;  // pbkdf2-sha256$<iterations>$<salt>$<hex>
    std::set<std::string> roles;
};

struct ServiceConfig {
    std::string pid_namespace = "escipub";
    std::string bind_address = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path data_dir = "data";
    std::chrono::seconds staging_ttl{24 * 3600};
    std::chrono::seconds session_ttl{8 * 3600};
    std::uint64_t upload_limit = 64ull << 20;
    std::filesystem::path ui_dir;  // static bundle served under /ui/; empty serves a placeholder page
    std::string public_url;        // base for staging URLs; derived from bind address and port when empty
    bool fsync = true;
    std::vector<UserRecord> users;

    const UserRecord* find_user(const std::string& name) const;
    std::vector<std::string> actors_with_role(const std::string& role) const;
};

// INI file: top-level keys, then one [user:<name>] section per user with
// `password` and a comma-separated `roles`. Relative paths resolve against
// the file's directory. Throws Error{BAD_REQUEST} naming the offending key.
ServiceConfig load_config(const std::filesystem::path& path);

} // namespace pubflow::service
