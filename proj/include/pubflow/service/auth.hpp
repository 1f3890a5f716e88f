#pragma once

#include "pubflow/common/codec.hpp"
#include "pubflow/service/config.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>

namespace pubflow::service {

inline constexpr int kDefaultHashIterations = 100000;

// pbkdf2-sha256$<iterations>$<salt>$<hex digest>; a random salt when empty.
std::string hash_password(std::string_view password, int iterations = kDefaultHashIterations, std::string salt = {});
// False for malformed hashes as well as wrong passwords.
bool verify_password(std::string_view stored, std::string_view password);

struct Session {
    std::string token;
    std::string actor_id;
    std::set<std::string> roles;
    Timestamp expires_at{};

    bool has_role(const std::string& role) const { return roles.count(role) > 0; }
};

class SessionStore {
public:
    explicit SessionStore(std::chrono::seconds ttl) : ttl_(ttl) {}

    // Throws Error{BAD_CREDENTIALS} with one message for every failure, and
    // does the same hashing work whether or not the user exists.
    Session login(const ServiceConfig& config, const std::string& username, const std::string& password);
    // Expired tokens are dropped and reported as absent.
    std::optional<Session> lookup(const std::string& token, Timestamp now = now_ms());
    void logout(const std::string& token);

private:
    std::chrono::seconds ttl_;
    std::mutex mu_;
    std::map<std::string, Session> sessions_;
};

} // namespace pubflow::service
