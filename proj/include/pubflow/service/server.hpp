#pragma once

#include "pubflow/engine/engine.hpp"
#include "pubflow/repository/repository.hpp"
#include "pubflow/service/auth.hpp"
#include "pubflow/service/config.hpp"
#include "pubflow/service/staging.hpp"

#include <atomic>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace pubflow::service {

// Engine and repository behind HTTP: sessions, role checks per route,
// the staging area and the service description.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds the configured address and port (0 picks one); returns the port.
    int bind();
    // Serves until stop(). Call after bind().
    void run();
    // Blocks until run() accepts connections. stop() is lost before that.
    void wait_until_ready() const;
    void stop();

    int port() const { return port_; }
    // Prefix of staging URLs: publicUrl, or http://<address>:<port>.
    std::string base_url() const;

    engine::Engine& engine() { return *engine_; }
    repository::Repository& repository() { return *repository_; }
    StagingArea& staging() { return *staging_; }

private:
    struct Context;
    void install_routes();

    ServiceConfig config_;
    std::unique_ptr<StagingArea> staging_;
    std::unique_ptr<engine::Engine> engine_;
    std::unique_ptr<repository::Repository> repository_;
    SessionStore sessions_;
    std::unique_ptr<httplib::Server> server_;
    std::atomic<int> port_{0};
};

} // namespace pubflow::service
