#include "pubflow/service/server.hpp"

#include "pubflow/repository/mime.hpp"
#include "pubflow/service/routes.hpp"

#include <httplib.h>

#include <fstream>
#include <functional>
#include <iterator>
#include <map>

namespace pubflow::service {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

constexpr const char* kPlaceholderPage = R"html(<!doctype html>
<html><head><meta charset="utf-8"><title>pubflow</title></head>
<body><h1>pubflow</h1><p>The browser workspace is not installed on this server. Set <code>uiDir</code> in the
configuration to the built bundle. The API is described at <a href="/api/description">/api/description</a>.</p></body></html>
)html";

// Staging URLs of this server resolve straight from disk, everything else
// goes through the default transports.
class StagingFetcher : public repository::Fetcher {
public:
    StagingFetcher(StagingArea& staging, std::function<std::string()> base_url)
        : staging_(staging), base_url_(std::move(base_url)) {}

    repository::Fetched get(const std::string& location) override {
        auto name = staging_.name_from_url(location, base_url_());
        if (!name) return fallback_.get(location);
        auto path = staging_.path_of(*name);
        if (!path) {
            throw Error(Errc::UNRESOLVABLE_LOCATION, "staging file is gone: " + location, {{"location", location}});
        }
        std::ifstream in(*path, std::ios::binary);
        return {Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()),
                repository::mime_for_name(*name)};
    }

    std::optional<std::string> content_type(const std::string& location) override {
        if (auto name = staging_.name_from_url(location, base_url_())) return repository::mime_for_name(*name);
        return fallback_.content_type(location);
    }

private:
    StagingArea& staging_;
    std::function<std::string()> base_url_;
    repository::DefaultFetcher fallback_;
};

json parse_body(const httplib::Request& req) {
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::BAD_REQUEST, "request body is not valid JSON");
    return j;
}

std::string str_member(const json& j, const char* key, bool required = true) {
    if (!j.is_object() || !j.contains(key) || j[key].is_null()) {
        if (required) throw Error(Errc::BAD_REQUEST, std::string("missing '") + key + "'");
        return {};
    }
    if (!j[key].is_string()) throw Error(Errc::BAD_REQUEST, std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
}

std::optional<std::string> opt_member(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return str_member(j, key);
}

bool bool_member(const json& j, const char* key, bool fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    if (!j[key].is_boolean()) throw Error(Errc::BAD_REQUEST, std::string("'") + key + "' must be a boolean");
    return j[key].get<bool>();
}

bool truthy(const std::string& s) { return s == "true" || s == "1" || s == "yes"; }

std::uint64_t positive(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        auto n = std::stoull(s, &used);
        if (used == s.size() && n > 0 && s[0] != '-') return n;
    } catch (const std::exception&) {
    }
    throw Error(Errc::BAD_REQUEST, std::string(what) + " must be a positive integer");
}

} // namespace

struct Service::Context {
    const httplib::Request& req;
    httplib::Response& res;
    std::optional<Session> session;

    std::vector<std::string> params;  // path captures in order

    void json_reply(const json& body, int status = 200) {
        res.status = status;
        res.set_content(body.dump(), kJson);
    }
    engine::Caller caller() const { return {session->actor_id, session->has_role("admin")}; }
};

Service::Service(ServiceConfig config) : config_(std::move(config)), sessions_(config_.session_ttl) {
    staging_ = std::make_unique<StagingArea>(config_.data_dir / "staging", config_.staging_ttl, config_.upload_limit);

    engine::Engine::Options eo;
    eo.data_dir = config_.data_dir;
    eo.journal.fsync = config_.fsync;
    eo.actors_with_role = [this](const std::string& role) { return config_.actors_with_role(role); };
    engine_ = std::make_unique<engine::Engine>(std::move(eo));

    repository::Repository::Options ro;
    ro.data_dir = config_.data_dir;
    ro.pid_namespace = config_.pid_namespace;
    ro.journal.fsync = config_.fsync;
    ro.fetcher = std::make_shared<StagingFetcher>(*staging_, [this] { return base_url(); });
    repository_ = std::make_unique<repository::Repository>(std::move(ro));

    server_ = std::make_unique<httplib::Server>();
    server_->set_payload_max_length(config_.upload_limit + (1u << 20));
    install_routes();
}

Service::~Service() { stop(); }

std::string Service::base_url() const {
    if (!config_.public_url.empty()) return config_.public_url;
    auto host = config_.bind_address == "0.0.0.0" || config_.bind_address.empty() ? "127.0.0.1" : config_.bind_address;
    return "http://" + host + ":" + std::to_string(port_.load());
}

int Service::bind() {
    int port = config_.port == 0 ? server_->bind_to_any_port(config_.bind_address)
                                 : (server_->bind_to_port(config_.bind_address, config_.port) ? config_.port : -1);
    if (port < 0) {
        throw Error(Errc::IO_ERROR, "cannot listen on " + config_.bind_address + ":" + std::to_string(config_.port));
    }
    port_ = port;
    return port;
}

void Service::run() { server_->listen_after_bind(); }

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::stop() {
    if (server_) server_->stop();
}

void Service::install_routes() {
    using Handler = std::function<void(Context&)>;
    std::map<std::string_view, Handler> handlers;

    auto participant = [](const Context& c, const engine::ProcessInstance& inst) {
        if (c.session->has_role("admin") || inst.initiator == c.session->actor_id) return;
        for (const auto& t : inst.tasks) {
            if (t.actor_id == c.session->actor_id) return;
        }
        throw Error(Errc::FORBIDDEN_ACTOR, c.session->actor_id + " takes no part in instance " + inst.instance_id);
    };

    handlers["login"] = [this](Context& c) {
        auto body = parse_body(c.req);
        auto s = sessions_.login(config_, str_member(body, "username"), str_member(body, "password"));
        c.json_reply({{"token", s.token},
                      {"actorId", s.actor_id},
                      {"roles", s.roles},
                      {"expiresAt", format_iso8601(s.expires_at)}});
    };
    handlers["logout"] = [this](Context& c) {
        sessions_.logout(c.session->token);
        c.res.status = 204;
    };
    handlers["session"] = [](Context& c) {
        c.json_reply({{"actorId", c.session->actor_id},
                      {"roles", c.session->roles},
                      {"expiresAt", format_iso8601(c.session->expires_at)}});
    };
    handlers["description"] = [](Context& c) { c.json_reply(service_description()); };

    handlers["listTasks"] = [this](Context& c) {
        json out = json::array();
        for (const auto& t : engine_->find_task_instances(c.session->actor_id)) out.push_back(engine::to_json(t));
        c.json_reply(out);
    };
    handlers["latestDefinitions"] = [this](Context& c) {
        json out = json::array();
        for (const auto& d : engine_->latest_definitions()) out.push_back(engine::summary_json(d));
        c.json_reply(out);
    };
    handlers["deployArchive"] = [this](Context& c) {
        std::string archive;
        if (c.req.is_multipart_form_data()) {
            if (!c.req.has_file("archive")) throw Error(Errc::BAD_REQUEST, "multipart field 'archive' is missing");
            archive = c.req.get_file_value("archive").content;
        } else {
            archive = c.req.body;
        }
        auto rec = engine_->deploy_archive(to_bytes(archive));
        c.json_reply(engine::summary_json(rec), 201);
    };
    handlers["startProcess"] = [this](Context& c) {
        auto [inst, task] = engine_->start_instance(c.params[0], c.session->actor_id);
        c.json_reply({{"instance", engine::to_json(inst)}, {"task", engine::to_json(task)}}, 201);
    };
    handlers["completeTask"] = [this](Context& c) {
        json body = c.req.body.empty() ? json::object() : parse_body(c.req);
        if (!body.is_object()) throw Error(Errc::BAD_REQUEST, "expected an object");
        auto transition = opt_member(body, "transition");
        engine::Variables writes;
        if (body.contains("variables") && !body["variables"].is_null()) {
            if (!body["variables"].is_object()) throw Error(Errc::BAD_REQUEST, "'variables' must be an object");
            for (const auto& [k, v] : body["variables"].items()) writes[k] = engine::TypedValue::from_json(v);
        }
        auto inst = engine_->complete_task(c.params[0], transition, writes, c.caller());
        c.json_reply(engine::to_json(inst));
    };
    handlers["listInstances"] = [this](Context& c) {
        json out = json::array();
        for (const auto& i : engine_->instances()) out.push_back(engine::to_json(i));
        c.json_reply(out);
    };
    handlers["getInstance"] = [this, participant](Context& c) {
        auto inst = engine_->instance(c.params[0]);
        participant(c, inst);
        c.json_reply(engine::to_json(inst));
    };
    handlers["getVariables"] = [this, participant](Context& c) {
        auto inst = engine_->instance(c.params[0]);
        participant(c, inst);
        json out = json::object();
        for (const auto& [k, v] : inst.variables) out[k] = v.to_json();
        c.json_reply(out);
    };
    handlers["getVariable"] = [this, participant](Context& c) {
        participant(c, engine_->instance(c.params[0]));
        c.json_reply({{"name", c.params[1]}, {"value", engine_->get_variable(c.params[0], c.params[1]).to_json()}});
    };
    handlers["setVariable"] = [this, participant](Context& c) {
        participant(c, engine_->instance(c.params[0]));
        auto value = engine::TypedValue::from_json(parse_body(c.req));
        engine_->set_variable(c.params[0], c.params[1], value);
        c.json_reply({{"name", c.params[1]}, {"value", value.to_json()}});
    };
    handlers["administerInstance"] = [this](Context& c) {
        auto body = parse_body(c.req);
        auto action = engine::admin_action_from(str_member(body, "action"));
        if (!action) throw Error(Errc::BAD_REQUEST, "action must be advance or stop");
        c.json_reply(engine::to_json(engine_->administer_instance(c.params[0], *action, c.caller())));
    };
    handlers["graphState"] = [this](Context& c) { c.json_reply(engine::to_json(engine_->render_graph_state(c.params[0]))); };

    handlers["uploadStaging"] = [this](Context& c) {
        if (!c.req.is_multipart_form_data() || !c.req.has_file("file")) {
            throw Error(Errc::BAD_REQUEST, "expected multipart/form-data with a 'file' field");
        }
        const auto& file = c.req.get_file_value("file");
        auto ref = staging_->put(file.filename, file.content, c.session->actor_id, base_url());
        c.json_reply(to_json(ref), 201);
    };
    handlers["getStaging"] = [this](Context& c) {
        auto path = staging_->path_of(c.params[0]);
        if (!path) throw Error(Errc::NOT_FOUND, "no staged file " + c.params[0]);
        std::ifstream in(*path, std::ios::binary);
        std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        c.res.set_content(std::move(data), repository::mime_for_name(c.params[0]));
    };

    handlers["ingest"] = [this](Context& c) {
        auto pid = repository_->ingest(c.req.body, c.req.get_param_value("format"), c.req.get_param_value("logMessage"));
        c.json_reply({{"pid", pid.str()}}, 201);
    };
    handlers["getObject"] = [this](Context& c) { c.json_reply(repository::to_json(repository_->get_object(c.params[0]))); };

    // JSON body, or raw content with the other fields as query parameters.
    auto read_datastream_request = [](const Context& c, repository::DatastreamSource& source,
                                      repository::DatastreamProps& props, std::optional<repository::DatastreamState>& state,
                                      std::string& log, bool& force) {
        auto type = c.req.get_header_value("Content-Type");
        if (type.rfind(kJson, 0) == 0) {
            auto body = parse_body(c.req);
            if (!body.is_object()) throw Error(Errc::BAD_REQUEST, "expected an object");
            source.mode = repository::source_mode_from(body.value("mode", std::string("byValue")));
            if (auto content = opt_member(body, "content")) source.content = base64_decode(*content);
            source.location = opt_member(body, "location");
            if (body.contains("altIds") && !body["altIds"].is_null()) {
                props.alt_ids = body["altIds"].get<std::vector<std::string>>();
            }
            props.label = opt_member(body, "dsLabel");
            props.versionable = bool_member(body, "versionable", true);
            props.mime_type = opt_member(body, "mimeType");
            props.format_uri = opt_member(body, "formatURI");
            if (auto s = opt_member(body, "dsState")) state = repository::datastream_state_from(*s);
            log = str_member(body, "logMessage", false);
            force = bool_member(body, "force", false);
            return;
        }
        auto q = [&](const char* key) -> std::optional<std::string> {
            if (!c.req.has_param(key)) return std::nullopt;
            return c.req.get_param_value(key);
        };
        source.mode = repository::source_mode_from(q("mode").value_or("byValue"));
        if (source.mode == repository::SourceMode::by_value) source.content = to_bytes(c.req.body);
        source.location = q("location");
        if (auto ids = q("altIds")) {
            std::vector<std::string> list;
            std::size_t at = 0;
            while (at <= ids->size()) {
                auto comma = ids->find(',', at);
                auto item = ids->substr(at, comma == std::string::npos ? std::string::npos : comma - at);
                if (!item.empty()) list.push_back(item);
                if (comma == std::string::npos) break;
                at = comma + 1;
            }
            props.alt_ids = std::move(list);
        }
        props.label = q("dsLabel");
        props.versionable = !q("versionable") || truthy(*q("versionable"));
        props.mime_type = q("mimeType");
        if (!props.mime_type && source.mode == repository::SourceMode::by_value && !type.empty()) {
            props.mime_type = type.substr(0, type.find(';'));
        }
        props.format_uri = q("formatURI");
        if (auto s = q("dsState")) state = repository::datastream_state_from(*s);
        log = q("logMessage").value_or("");
        force = q("force") && truthy(*q("force"));
    };
    auto consume_staged = [this](const repository::DatastreamSource& source) {
        if (source.mode != repository::SourceMode::by_reference || !source.location) return;
        if (auto name = staging_->name_from_url(*source.location, base_url())) staging_->consume(*name);
    };

    handlers["addDatastream"] = [this, read_datastream_request, consume_staged](Context& c) {
        repository::DatastreamSource source;
        repository::DatastreamProps props;
        std::optional<repository::DatastreamState> state;
        std::string log;
        bool force = false;
        read_datastream_request(c, source, props, state, log, force);
        auto n = repository_->add_datastream(c.params[0], c.params[1], source, props, log);
        consume_staged(source);
        c.json_reply({{"versionNo", n}}, 201);
    };
    handlers["modifyDatastream"] = [this, read_datastream_request, consume_staged](Context& c) {
        repository::DatastreamSource source;
        repository::DatastreamProps props;
        std::optional<repository::DatastreamState> state;
        std::string log;
        bool force = false;
        read_datastream_request(c, source, props, state, log, force);
        if (source.mode == repository::SourceMode::by_value && source.content && source.content->empty() &&
            c.req.get_header_value("Content-Type").rfind(kJson, 0) != 0) {
            source.content.reset();  // no body: keep the previous content
        }
        auto n = repository_->modify_datastream(c.params[0], c.params[1], source, props, state, log, force);
        consume_staged(source);
        c.json_reply({{"versionNo", n}});
    };
    handlers["getDatastream"] = [this](Context& c) {
        std::optional<std::uint64_t> version;
        if (c.req.has_param("version")) version = positive(c.req.get_param_value("version"), "version");
        auto got = repository_->get_datastream(c.params[0], c.params[1], version);
        c.res.set_header("X-Pubflow-Version", std::to_string(got.version.version_no));
        c.res.set_header("X-Pubflow-Digest", got.version.digest);
        c.res.set_content(std::string(as_chars(got.content)), got.version.mime_type);
    };
    handlers["findObjects"] = [this](Context& c) {
        auto body = parse_body(c.req);
        if (!body.is_object() || !body.contains("conditions") || !body["conditions"].is_array()) {
            throw Error(Errc::BAD_REQUEST, "expected {\"conditions\": [...], \"maxResults\": n}");
        }
        std::vector<repository::SearchCondition> conditions;
        for (const auto& cond : body["conditions"]) conditions.push_back(repository::condition_from_json(cond));
        std::size_t max_results = 100;
        if (body.contains("maxResults")) {
            if (!body["maxResults"].is_number_integer() || body["maxResults"].get<long long>() < 1) {
                throw Error(Errc::BAD_REQUEST, "maxResults must be a positive integer");
            }
            max_results = body["maxResults"].get<std::size_t>();
        }
        c.json_reply(repository::to_json(repository_->find_objects(conditions, max_results)));
    };

    for (const auto& route : route_table()) {
        auto it = handlers.find(route.name);
        if (it == handlers.end()) throw Error(Errc::IO_ERROR, "no handler for route " + std::string(route.name));
        auto handler = it->second;
        auto wrapped = [this, &route, handler](const httplib::Request& req, httplib::Response& res) {
            Context c{req, res, std::nullopt, {}};
            for (std::size_t i = 1; i < req.matches.size(); ++i) c.params.push_back(req.matches[i].str());
            try {
                if (!route.is_public()) {
                    auto auth = req.get_header_value("Authorization");
                    if (auth.rfind("Bearer ", 0) == 0) c.session = sessions_.lookup(auth.substr(7));
                    if (!c.session) throw Error(Errc::UNAUTHENTICATED, "missing, unknown or expired session token");
                    bool allowed = std::any_of(route.roles.begin(), route.roles.end(),
                                               [&](std::string_view r) { return c.session->has_role(std::string(r)); });
                    if (!allowed) throw Error(Errc::FORBIDDEN, "operation " + std::string(route.name) + " is not open to " +
                                                                   c.session->actor_id);
                }
                handler(c);
            } catch (const Error& e) {
                c.json_reply(error_body(e), http_status(e.code()));
            } catch (const json::exception& e) {
                c.json_reply(error_body(Error(Errc::BAD_REQUEST, std::string("malformed request: ") + e.what())), 400);
            } catch (const std::exception& e) {
                c.json_reply(error_body(Error(Errc::IO_ERROR, e.what())), 500);
            }
        };
        auto pattern = path_regex(route.path);
        if (route.method == "GET") server_->Get(pattern, wrapped);
        else if (route.method == "POST") server_->Post(pattern, wrapped);
        else if (route.method == "PUT") server_->Put(pattern, wrapped);
    }

    if (!config_.ui_dir.empty() && std::filesystem::is_directory(config_.ui_dir)) {
        server_->set_mount_point("/ui", config_.ui_dir.string());
    } else {
        server_->Get("/ui/?.*", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
    server_->Get("/ui", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/"); });

    // Anything httplib answers by itself (unknown path, oversized body) still
    // gets an error body.
    server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        Errc code = res.status == 413 ? Errc::PAYLOAD_TOO_LARGE : res.status == 404 ? Errc::NOT_FOUND : Errc::BAD_REQUEST;
        res.set_content(error_body(Error(code, httplib::status_message(res.status))).dump(), kJson);
    });
}

} // namespace pubflow::service
