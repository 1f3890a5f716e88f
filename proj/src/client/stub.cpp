#include "pubflow/client/stub.hpp"

#include "pubflow/common/xml.hpp"

#include <httplib.h>

#include <fstream>
#include <iterator>

namespace pubflow::client {

using nlohmann::json;

namespace {

constexpr const char* kOaiDc = "http://www.openarchives.org/OAI/2.0/oai_dc/";
constexpr const char* kDc = "http://purl.org/dc/elements/1.1/";
constexpr const char* kIngestNs = "urn:pubflow:foxml-1";
// Serialization order of the DC elements, same as the repository's.
const std::vector<std::string> kDcOrder{"title", "creator", "subject", "description", "publisher", "contributor",
                                        "date",  "type",    "language", "coverage",   "rights",    "identifier"};

std::string segment(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' || c == ':') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in || std::filesystem::is_directory(p)) {
        throw ClientError(ClientError::Kind::usage, "cannot read " + p.string(), 0, "FILE_NOT_FOUND");
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

[[noreturn]] void transport_failure(const std::string& what, httplib::Error e) {
    throw ClientError(ClientError::Kind::transport, what + ": " + httplib::to_string(e));
}

} // namespace

Stub::Stub(StubConfig config) : config_(std::move(config)) {
    if (config_.base_url.rfind("http://", 0) != 0) {
        throw ClientError(ClientError::Kind::usage, "server URL must start with http://, got '" + config_.base_url + "'");
    }
    if (config_.timeout_seconds <= 0) throw ClientError(ClientError::Kind::usage, "timeout must be positive");
    while (config_.base_url.size() > 7 && config_.base_url.back() == '/') config_.base_url.pop_back();
    http_ = std::make_unique<httplib::Client>(config_.base_url);
    http_->set_connection_timeout(config_.timeout_seconds);
    http_->set_read_timeout(config_.timeout_seconds);
    http_->set_write_timeout(config_.timeout_seconds);
}

Stub::~Stub() = default;

json Stub::expect_json(const std::string& what, int status, const std::string& body) {
    auto j = json::parse(body, nullptr, false);
    if (status >= 200 && status < 300) {
        if (body.empty()) return nullptr;
        if (j.is_discarded()) throw ClientError(ClientError::Kind::server, what + ": unreadable response", status);
        return j;
    }
    std::string code = "HTTP_" + std::to_string(status);
    std::string message = what + " failed with HTTP " + std::to_string(status);
    json detail;
    if (!j.is_discarded() && j.is_object()) {
        code = j.value("code", code);
        message = j.value("message", message);
        if (j.contains("detail")) detail = j["detail"];
    }
    throw ClientError(ClientError::Kind::server, message, status, code, detail);
}

const std::string& Stub::token() {
    if (!token_.empty()) return token_;
    json body{{"username", config_.username}, {"password", config_.password}};
    auto res = http_->Post("/auth/login", body.dump(), "application/json");
    if (!res) transport_failure("login", res.error());
    token_ = expect_json("login", res->status, res->body).at("token").get<std::string>();
    return token_;
}

json Stub::call(const std::string& method, const std::string& path, const json& body) {
    httplib::Headers headers{{"Authorization", "Bearer " + token()}};
    httplib::Result res;
    auto payload = body.is_null() ? std::string() : body.dump();
    if (method == "GET") res = http_->Get(path, headers);
    else if (method == "POST") res = http_->Post(path, headers, payload, "application/json");
    else if (method == "PUT") res = http_->Put(path, headers, payload, "application/json");
    else throw ClientError(ClientError::Kind::usage, "unsupported method " + method);
    if (!res) transport_failure(method + " " + path, res.error());
    return expect_json(method + " " + path, res->status, res->body);
}

std::string Stub::ingest_new_object() {
    xml::Writer w;
    w.empty("object", {{"xmlns", kIngestNs}, {"label", "ESCIPUB"}, {"contentModel", "article"}});
    httplib::Headers headers{{"Authorization", "Bearer " + token()}};
    auto res = http_->Post("/repo/objects?format=pubfoxml-1.0&logMessage=initial%20creation", headers, w.str(), "text/xml");
    if (!res) transport_failure("ingest", res.error());
    return expect_json("ingest", res->status, res->body).at("pid").get<std::string>();
}

bool Stub::change_dc(const std::string& pid, const DcFields& fields) {
    auto all = fields;
    auto& ids = all["identifier"];
    if (std::find(ids.begin(), ids.end(), pid) == ids.end()) ids.insert(ids.begin(), pid);

    xml::Writer w;
    w.open("oai_dc:dc", {{"xmlns:oai_dc", kOaiDc}, {"xmlns:dc", kDc}});
    for (const auto& name : kDcOrder) {
        if (auto it = all.find(name); it != all.end()) {
            for (const auto& v : it->second) w.leaf("dc:" + name, v);
        }
    }
    for (const auto& [name, values] : all) {  // unknown names go last; the server decides
        if (std::find(kDcOrder.begin(), kDcOrder.end(), name) != kDcOrder.end()) continue;
        for (const auto& v : values) w.leaf("dc:" + name, v);
    }

    httplib::Headers headers{{"Authorization", "Bearer " + token()}};
    auto res = http_->Put("/repo/objects/" + segment(pid) +
                              "/datastreams/DC?mode=byValue&versionable=true&mimeType=text/xml&logMessage=update",
                          headers, w.str(), "text/xml");
    if (!res) transport_failure("change DC", res.error());
    try {
        expect_json("change DC of " + pid, res->status, res->body);
    } catch (const ClientError& e) {
        last_error_ = e.code() + ": " + e.what();
        return false;
    }
    last_error_.clear();
    return true;
}

std::uint64_t Stub::save_article(const std::string& pid, const StagingRef& staged, const std::string& creator) {
    auto object = call("GET", "/repo/objects/" + segment(pid));
    const auto& streams = object.at("datastreams");
    bool exists = streams.contains("ARTICLE") && streams["ARTICLE"].value("state", "A") != "D";

    json body{{"mode", "byReference"},
              {"location", staged.url},
              {"mimeType", staged.mime_type},
              {"formatURI", creator},
              {"logMessage", "upload"}};
    auto path = "/repo/objects/" + segment(pid) + "/datastreams/ARTICLE";
    json reply;
    if (exists) {
        reply = call("PUT", path, body);
    } else {
        auto dash = staged.name.find('-');
        body["dsLabel"] = dash == std::string::npos ? staged.name : staged.name.substr(dash + 1);
        reply = call("POST", path, body);
    }
    return reply.at("versionNo").get<std::uint64_t>();
}

std::vector<ObjectRow> Stub::do_query(const std::string& field, const std::string& op, const std::string& value,
                                      int max_results) {
    json body{{"conditions", json::array({{{"field", field}, {"operator", op}, {"value", value}}})},
              {"maxResults", max_results}};
    auto reply = call("POST", "/repo/search", body);
    std::vector<ObjectRow> rows;
    for (const auto& r : reply.at("rows")) {
        ObjectRow row;
        for (const auto& [k, v] : r.items()) {
            if (v.is_string()) row[k] = {v.get<std::string>()};
            else row[k] = v.get<std::vector<std::string>>();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

DeployResult Stub::deploy_archive(const std::filesystem::path& archive) {
    auto bytes = read_file(archive);
    httplib::MultipartFormDataItems items{{"archive", std::move(bytes), archive.filename().string(), "application/zip"}};
    httplib::Headers headers{{"Authorization", "Bearer " + token()}};
    auto res = http_->Post("/api/definitions", headers, items);
    if (!res) transport_failure("deploy", res.error());
    auto reply = expect_json("deploy " + archive.filename().string(), res->status, res->body);
    return {reply.at("name").get<std::string>(), reply.at("version").get<int>()};
}

StagingRef Stub::upload_staging(const std::filesystem::path& file) {
    auto bytes = read_file(file);
    httplib::MultipartFormDataItems items{{"file", std::move(bytes), file.filename().string(), "application/octet-stream"}};
    httplib::Headers headers{{"Authorization", "Bearer " + token()}};
    auto res = http_->Post("/staging", headers, items);
    if (!res) transport_failure("upload", res.error());
    auto reply = expect_json("upload " + file.filename().string(), res->status, res->body);
    return {reply.at("name").get<std::string>(), reply.at("url").get<std::string>(),
            reply.at("mimeType").get<std::string>(), reply.at("size").get<std::uint64_t>()};
}

} // namespace pubflow::client
