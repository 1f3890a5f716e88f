#include "pubflow/common/error.hpp"
#include "pubflow/service/auth.hpp"
#include "pubflow/service/server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

namespace {

pubflow::service::Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pubflowd: workflow and repository service", "pubflowd"};
    std::string config_path;
    int port = -1;
    std::string data_dir;
    app.add_option("--config,-c", config_path, "INI configuration file");
    app.add_option("--port,-p", port, "Override the configured port; 0 picks a free one");
    app.add_option("--data-dir", data_dir, "Override the configured data directory");

    std::string password;
    int iterations = pubflow::service::kDefaultHashIterations;
    auto* hash = app.add_subcommand("hash-password", "Print a password hash for a [user:...] section");
    hash->add_option("password", password, "Read from stdin when omitted");
    hash->add_option("--iterations", iterations)->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (hash->parsed()) {
        if (password.empty() && !std::getline(std::cin, password)) {
            std::cerr << "pubflowd: no password given\n";
            return 2;
        }
        std::cout << pubflow::service::hash_password(password, iterations) << "\n";
        return 0;
    }

    try {
        pubflow::service::ServiceConfig config;
        if (!config_path.empty()) config = pubflow::service::load_config(config_path);
        if (port >= 0) config.port = port;
        if (!data_dir.empty()) config.data_dir = data_dir;

        pubflow::service::Service service(config);
        int bound = service.bind();
        g_service = &service;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cout << "pubflowd listening on " << service.base_url() << " (port " << bound << ")" << std::endl;
        service.run();
        g_service = nullptr;
    } catch (const pubflow::Error& e) {
        std::cerr << "pubflowd: " << pubflow::to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
