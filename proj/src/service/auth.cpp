#include "pubflow/service/auth.hpp"

#include "pubflow/common/error.hpp"

#include <boost/algorithm/string.hpp>

#include <vector>

namespace pubflow::service {

namespace {

constexpr std::string_view kScheme = "pbkdf2-sha256";

struct ParsedHash {
    int iterations = 0;
    std::string salt;
    std::string digest;
};

std::optional<ParsedHash> parse_hash(std::string_view stored) {
    std::vector<std::string> parts;
    boost::split(parts, stored, boost::is_any_of("$"));
    if (parts.size() != 4 || parts[0] != kScheme) return std::nullopt;
    ParsedHash h;
    try {
        std::size_t used = 0;
        h.iterations = std::stoi(parts[1], &used);
        if (used != parts[1].size() || h.iterations < 1) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
    h.salt = parts[2];
    h.digest = parts[3];
    if (h.salt.empty() || h.digest.size() != 64) return std::nullopt;
    return h;
}

} // namespace

std::string hash_password(std::string_view password, int iterations, std::string salt) {
    if (salt.empty()) salt = random_hex(16);
    return std::string(kScheme) + "$" + std::to_string(iterations) + "$" + salt + "$" +
           pbkdf2_sha256_hex(password, salt, iterations);
}

bool verify_password(std::string_view stored, std::string_view password) {
    auto h = parse_hash(stored);
    if (!h) return false;
    return secure_equals(pbkdf2_sha256_hex(password, h->salt, h->iterations), h->digest);
}

Session SessionStore::login(const ServiceConfig& config, const std::string& username, const std::string& password) {
    const auto* user = config.find_user(username);
    bool ok;
    if (user) {
        ok = verify_password(user->password_hash, password);
    } else {
        // Same cost as a real check so timing does not reveal user names.
        static const std::string dummy = hash_password("unused", kDefaultHashIterations, "00000000000000000000000000000000");
        verify_password(dummy, password);
        ok = false;
    }
    if (!ok) throw Error(Errc::BAD_CREDENTIALS, "invalid user name or password");

    Session s;
    s.token = random_hex(32);
    s.actor_id = user->name;
    s.roles = user->roles;
    s.expires_at = now_ms() + std::chrono::duration_cast<std::chrono::milliseconds>(ttl_);
    std::lock_guard lock(mu_);
    sessions_[s.token] = s;
    return s;
}

std::optional<Session> SessionStore::lookup(const std::string& token, Timestamp now) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) return std::nullopt;
    if (it->second.expires_at <= now) {
        sessions_.erase(it);
        return std::nullopt;
    }
    return it->second;
}

void SessionStore::logout(const std::string& token) {
    std::lock_guard lock(mu_);
    sessions_.erase(token);
}

} // namespace pubflow::service
