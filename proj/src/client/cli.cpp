#include "pubflow/client/cli.hpp"

#include "pubflow/client/stub.hpp"

#include <CLI11.hpp>

#include <functional>
#include <regex>

namespace pubflow::client {

using nlohmann::json;

namespace {

std::pair<std::string, std::string> split_assignment(const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ClientError(ClientError::Kind::usage, "expected name=value, got '" + kv + "'");
    }
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

void print_violations(const json& detail, std::ostream& err) {
    if (!detail.is_object() || !detail.contains("violations")) return;
    for (const auto& v : detail["violations"]) {
        err << "  " << v.value("code", "") << " " << v.value("subject", "") << ": " << v.value("message", "") << "\n";
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pubflow: command line client for the pubflow service", "pubflow"};
    app.require_subcommand(1);

    StubConfig config;
    config.base_url = "http://127.0.0.1:8080";
    bool as_json = false;
    app.add_option("--server", config.base_url, "Service base URL")->envname("PUBFLOW_SERVER");
    app.add_option("--user", config.username, "User name")->envname("PUBFLOW_USER");
    app.add_option("--password", config.password, "Password")->envname("PUBFLOW_PASSWORD");
    app.add_option("--timeout", config.timeout_seconds, "Request timeout in seconds");
    app.add_flag("--json", as_json, "Machine-readable output");

    std::function<void(Stub&)> action;

    std::string archive;
    auto* deploy = app.add_subcommand("deploy", "Deploy a process archive (zip)");
    deploy->add_option("archive", archive)->required();
    deploy->callback([&] {
        action = [&](Stub& s) {
            auto r = s.deploy_archive(archive);
            if (as_json) out << json{{"name", r.name}, {"version", r.version}}.dump() << "\n";
            else out << "deployed " << r.name << " version " << r.version << "\n";
        };
    });

    auto* ingest = app.add_subcommand("ingest", "Create an empty article object and print its pid");
    ingest->callback([&] {
        action = [&](Stub& s) {
            auto pid = s.ingest_new_object();
            if (as_json) out << json{{"pid", pid}}.dump() << "\n";
            else out << pid << "\n";
        };
    });

    std::string pid;
    std::vector<std::string> assignments;
    auto* dc = app.add_subcommand("dc", "Dublin Core metadata");
    dc->require_subcommand(1);
    auto* dc_set = dc->add_subcommand("set", "Replace the DC record; repeat a name for several values");
    dc_set->add_option("pid", pid)->required();
    dc_set->add_option("fields", assignments, "name=value ...")->required();
    dc_set->callback([&] {
        action = [&](Stub& s) {
            DcFields fields;
            for (const auto& a : assignments) {
                auto [k, v] = split_assignment(a);
                fields[k].push_back(v);
            }
            if (!s.change_dc(pid, fields)) {
                throw ClientError(ClientError::Kind::server, "DC update rejected: " + s.last_error());
            }
            if (as_json) out << json{{"pid", pid}, {"success", true}}.dump() << "\n";
            else out << "updated DC of " << pid << "\n";
        };
    });

    std::string file, creator;
    auto* article = app.add_subcommand("article", "Article content");
    article->require_subcommand(1);
    auto* put = article->add_subcommand("put", "Upload a file and store it as the ARTICLE datastream");
    put->add_option("pid", pid)->required();
    put->add_option("file", file)->required();
    put->add_option("--creator", creator, "Stored as the format URI; defaults to --user");
    put->callback([&] {
        action = [&](Stub& s) {
            auto staged = s.upload_staging(file);
            auto version = s.save_article(pid, staged, creator.empty() ? config.username : creator);
            if (as_json) {
                out << json{{"pid", pid}, {"versionNo", version}, {"mimeType", staged.mime_type}, {"size", staged.size}}.dump()
                    << "\n";
            } else {
                out << "stored ARTICLE version " << version << " of " << pid << " (" << staged.mime_type << ", "
                    << staged.size << " bytes)\n";
            }
        };
    });

    std::string field, op, value;
    int max_results = 100;
    auto* query = app.add_subcommand("query", "Search objects with one condition");
    query->add_option("field", field)->required();
    query->add_option("operator", op)->required()->check(CLI::IsMember({"eq", "has", "gt", "ge", "lt", "le"}));
    query->add_option("value", value)->required();
    query->add_option("--max", max_results, "Maximum number of rows")->check(CLI::PositiveNumber);
    query->callback([&] {
        action = [&](Stub& s) {
            auto rows = s.do_query(field, op, value, max_results);
            if (as_json) {
                out << json(rows).dump() << "\n";
                return;
            }
            for (const auto& row : rows) {
                auto first = [&](const char* k) {
                    auto it = row.find(k);
                    return it == row.end() || it->second.empty() ? std::string() : it->second.front();
                };
                out << first("pid") << "\t" << first("title") << "\t" << first("creator") << "\n";
            }
        };
    });

    std::string admin_action, instance;
    auto* admin = app.add_subcommand("admin", "Advance or stop an instance");
    admin->add_option("action", admin_action)->required()->check(CLI::IsMember({"advance", "stop"}));
    admin->add_option("instance", instance)->required();
    admin->callback([&] {
        action = [&](Stub& s) {
            auto inst = s.call("POST", "/api/instances/" + instance + "/admin", {{"action", admin_action}});
            if (as_json) out << inst.dump() << "\n";
            else out << "instance " << inst.value("instanceId", "") << " " << inst.value("state", "") << "\n";
        };
    });

    std::string definition;
    auto* start = app.add_subcommand("start", "Start an instance of a definition (id or name)");
    start->add_option("definition", definition)->required();
    start->callback([&] {
        action = [&](Stub& s) {
            auto id = definition;
            if (!std::regex_match(id, std::regex("d[0-9]+"))) {
                id.clear();
                for (const auto& d : s.call("GET", "/api/definitions/latest")) {
                    if (d.value("name", "") == definition) id = d.value("definitionId", "");
                }
                if (id.empty()) throw ClientError(ClientError::Kind::server, "no definition named " + definition, 404,
                                                  "UNKNOWN_DEFINITION");
            }
            auto r = s.call("POST", "/api/processes/" + id + "/start");
            if (as_json) {
                out << r.dump() << "\n";
                return;
            }
            out << "instance " << r["instance"].value("instanceId", "") << " task " << r["task"].value("taskInstanceId", "")
                << " (" << r["task"].value("taskName", "") << ")\n";
        };
    });

    auto* tasks = app.add_subcommand("tasks", "List your open tasks");
    tasks->callback([&] {
        action = [&](Stub& s) {
            auto list = s.call("GET", "/api/tasks");
            if (as_json) {
                out << list.dump() << "\n";
                return;
            }
            for (const auto& t : list) {
                out << t.value("taskInstanceId", "") << "\t" << t.value("taskName", "") << "\t" << t.value("instanceId", "")
                    << "\n";
            }
        };
    });

    std::string task_id, transition;
    std::vector<std::string> vars;
    auto* complete = app.add_subcommand("complete", "Complete a task, optionally writing string variables");
    complete->add_option("task", task_id)->required();
    complete->add_option("--transition,-t", transition, "Transition to take; the default one when omitted");
    complete->add_option("--var", vars, "name=value, stored as a string variable");
    complete->callback([&] {
        action = [&](Stub& s) {
            json variables = json::object();
            for (const auto& a : vars) {
                auto [k, v] = split_assignment(a);
                variables[k] = {{"type", "string"}, {"value", v}};
            }
            json body{{"variables", variables}};
            if (!transition.empty()) body["transition"] = transition;
            auto inst = s.call("POST", "/api/tasks/" + task_id + "/complete", body);
            if (as_json) out << inst.dump() << "\n";
            else out << "instance " << inst.value("instanceId", "") << " " << inst.value("state", "") << "\n";
        };
    });

    std::vector<const char*> argv{"pubflow"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Stub stub(config);
        action(stub);
        return kExitOk;
    } catch (const ClientError& e) {
        switch (e.kind()) {
        case ClientError::Kind::usage:
            err << "pubflow: " << e.what() << "\n";
            return kExitUsage;
        case ClientError::Kind::transport:
            err << "pubflow: cannot reach " << config.base_url << ": " << e.what() << "\n";
            return kExitTransport;
        case ClientError::Kind::server:
            err << "pubflow: " << (e.code().empty() ? "" : e.code() + ": ") << e.what() << "\n";
            print_violations(e.detail(), err);
            return kExitServer;
        }
    } catch (const json::exception& e) {
        err << "pubflow: unexpected response: " << e.what() << "\n";
        return kExitServer;
    }
    return kExitServer;
}

} // namespace pubflow::client
