#pragma once

#include "pubflow/service/auth.hpp"
#include "pubflow/service/server.hpp"
#include "support/fixtures.hpp"

#include <httplib.h>
#include <json.hpp>

#include <memory>
#include <thread>

namespace pubflow::testing {

// Same people as the engine tests: two authors, two QA staff, one admin.
// Every password is "pw"; cheap hashes keep the tests fast.
inline service::ServiceConfig test_service_config(const std::filesystem::path& data_dir) {
    service::ServiceConfig config;
    config.port = 0;
    config.data_dir = data_dir;
    config.fsync = false;
    auto hash = service::hash_password("pw", 1000);
    config.users = {{"alice", hash, {"author"}},
                    {"dave", hash, {"author"}},
                    {"bob", hash, {"qa"}},
                    {"quinn", hash, {"qa"}},
                    {"root", hash, {"admin"}}};
    return config;
}

// A Service on an ephemeral port, served from a background thread.
class RunningService {
public:
    explicit RunningService(service::ServiceConfig config) {
        service_ = std::make_unique<service::Service>(std::move(config));
        service_->bind();
        thread_ = std::thread([this] { service_->run(); });
        service_->wait_until_ready();
    }
    ~RunningService() {
        service_->stop();
        thread_.join();
    }

    service::Service& operator*() { return *service_; }
    service::Service* operator->() { return service_.get(); }
    std::string url() const { return service_->base_url(); }

    httplib::Client client() const {
        httplib::Client c(url());
        c.set_read_timeout(30);
        return c;
    }

    // Bearer token for a test user, or "" when login fails.
    std::string login(const std::string& user, const std::string& password = "pw") const {
        auto c = client();
        auto res = c.Post("/auth/login", nlohmann::json{{"username", user}, {"password", password}}.dump(),
                          "application/json");
        if (!res || res->status != 200) return {};
        return nlohmann::json::parse(res->body).at("token").get<std::string>();
    }

private:
    std::unique_ptr<service::Service> service_;
    std::thread thread_;
};

inline httplib::Headers bearer(const std::string& token) {
    if (token.empty()) return {};
    return {{"Authorization", "Bearer " + token}};
}

} // namespace pubflow::testing
