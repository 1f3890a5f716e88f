#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace httplib {
class Client;
}

// Hand-written stub against the service description. It declares only the
// shapes its own operations exchange; everything else stays JSON.
namespace pubflow::client {

struct StubConfig {
    std::string base_url;  // http://host:port
    std::string username;
    std::string password;
    int timeout_seconds = 30;
};

class ClientError : public std::runtime_error {
public:
    enum class Kind { usage, transport, server };

    ClientError(Kind kind, const std::string& message, int status = 0, std::string code = {},
                nlohmann::json detail = nullptr)
        : std::runtime_error(message), kind_(kind), status_(status), code_(std::move(code)), detail_(std::move(detail)) {}

    Kind kind() const { return kind_; }
    int status() const { return status_; }            // HTTP status for server errors
    const std::string& code() const { return code_; }  // server error code, or FILE_NOT_FOUND
    const nlohmann::json& detail() const { return detail_; }

private:
    Kind kind_;
    int status_;
    std::string code_;
    nlohmann::json detail_;
};

struct StagingRef {
    std::string name;
    std::string url;
    std::string mime_type;
    std::uint64_t size = 0;
};

// Dublin Core element name to its values.
using DcFields = std::map<std::string, std::vector<std::string>>;
// A search row: pid, label, cDate and mDate as one-element lists, Dublin Core
// elements as given.
using ObjectRow = std::map<std::string, std::vector<std::string>>;

struct DeployResult {
    std::string name;
    int version = 0;
};

class Stub {
public:
    explicit Stub(StubConfig config);
    ~Stub();

    std::string ingest_new_object();
    // False when the server rejects the update; last_error() says why.
    bool change_dc(const std::string& pid, const DcFields& fields);
    // Adds ARTICLE the first time and modifies it afterwards, by reference.
    std::uint64_t save_article(const std::string& pid, const StagingRef& staged, const std::string& creator);
    std::vector<ObjectRow> do_query(const std::string& field, const std::string& op, const std::string& value,
                                    int max_results = 100);
    DeployResult deploy_archive(const std::filesystem::path& archive);

    StagingRef upload_staging(const std::filesystem::path& file);

    // Authenticated JSON call for the workflow endpoints.
    nlohmann::json call(const std::string& method, const std::string& path, const nlohmann::json& body = nullptr);

    const std::string& last_error() const { return last_error_; }

private:
    const std::string& token();
    nlohmann::json expect_json(const std::string& what, int status, const std::string& body);

    StubConfig config_;
    std::unique_ptr<httplib::Client> http_;
    std::string token_;
    std::string last_error_;
};

} // namespace pubflow::client
