// Command-line front end. Every verb builds a /v1 request and runs it through
// the same Api the HTTP server uses; --json prints the response document.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epidss/service/api.hpp"
#include "epidss/service/http.hpp"

using epidss::service::Api;
using epidss::service::Json;
using epidss::service::Response;

namespace {

struct Globals {
    std::string store;
    bool json = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw epidss::Error(epidss::ErrorCode::Io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string store_dir(const Globals& g) {
    if (!g.store.empty()) return g.store;
    if (const char* env = std::getenv("EPIDSS_STORE"); env && *env) return env;
    return "epidss-store";
}

std::pair<std::string, std::string> split_once(const std::string& s, char sep, const char* what) {
    auto i = s.find(sep);
    if (i == std::string::npos || i == 0)
        throw epidss::Error(epidss::ErrorCode::InvalidArgument, std::string("expected ") + what + ", got '" + s + "'");
    return {s.substr(0, i), s.substr(i + 1)};
}

std::vector<double> parse_numbers(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw epidss::Error(epidss::ErrorCode::Parse, "not a number: '" + item + "'");
        }
    }
    return out;
}

// Var=state pairs and Var=l1,l2,... likelihoods into an evidence document.
Json evidence_doc(const std::vector<std::string>& sets, const std::vector<std::string>& softs) {
    Json ev{{"hard", Json::object()}, {"soft", Json::object()}};
    for (const auto& s : sets) {
        auto [var, state] = split_once(s, '=', "Var=state");
        ev["hard"][var] = state;
    }
    for (const auto& s : softs) {
        auto [var, lik] = split_once(s, '=', "Var=l1,l2,...");
        ev["soft"][var] = parse_numbers(lik);
    }
    return ev;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmt_vector(const Json& states, const Json& p) {
    std::string out;
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (s) out += "  ";
        out += (states.is_array() ? states[s].get<std::string>() : std::to_string(s)) + "=" + fmt(p[s].get<double>());
    }
    return out;
}

std::string engine_line(const Json& e) {
    std::string out = "engine: " + e["name"].get<std::string>() + " (width " + std::to_string(e["width"].get<int>()) +
                      ", seed " + std::to_string(e["seed"].get<std::uint64_t>());
    if (e.contains("samples")) out += ", n=" + std::to_string(e["samples"].get<std::size_t>());
    return out + ")";
}

// Human-readable rendering, keyed by verb.
void print_text(const std::string& verb, const Json& b) {
    auto& out = std::cout;
    if (verb == "template" || verb == "scenario show" || verb == "scenario list" || verb == "cost set") {
        if (verb == "scenario list") {
            for (const auto& s : b["scenarios"])
                out << s["id"].get<std::string>() << "  rev " << s["revision"] << "  " << s["name"].get<std::string>() << "\n";
        } else if (verb == "scenario show") {
            out << "id: " << b["id"].get<std::string>() << "\nname: " << b["name"].get<std::string>()
                << "\nrevision: " << b["revision"] << "\nevidence entries: " << b["evidence"].size()
                << "\ncost models: " << b["costs"].size() << "\n" << engine_line(b["summary"]["engine"]) << "\n";
            for (const auto& [var, p] : b["summary"]["posteriors"].items()) {
                const Json* states = nullptr;
                for (const auto& v : b["network"]["variables"])
                    if (v["id"] == var) states = &v["states"];
                out << "  " << var << ": " << fmt_vector(states ? *states : Json(), p) << "\n";
            }
        } else if (verb == "cost set") {
            out << "cost model '" << b["cost"].get<std::string>() << "' stored, revision " << b["revision"] << "\n";
        } else {
            out << b.dump(2) << "\n";
        }
        return;
    }
    if (verb == "scenario new") {
        out << b["id"].get<std::string>() << "\n";
        for (const auto& w : b["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
        return;
    }
    if (verb == "evidence add") {
        out << "revision " << b["revision"] << "\n";
        return;
    }
    if (verb == "query") {
        out << "revision " << b["revision"] << "\n" << engine_line(b["engine"]) << "\n";
        if (b.contains("posterior"))
            out << b["variable"].get<std::string>() << ": " << fmt_vector(b["states"], b["posterior"]) << "\n";
        else
            for (const auto& [var, p] : b["posteriors"].items()) out << var << ": " << fmt_vector(Json(), p) << "\n";
        return;
    }
    if (verb == "risk") {
        out << "risk " << fmt(b["risk"].get<double>()) << " (" << b["variable"].get<std::string>() << ", cost '"
            << b["cost"].get<std::string>() << "', revision " << b["revision"] << ")\n";
        for (const auto& c : b["contributions"])
            out << "  " << c["state"].get<std::string>() << ": " << fmt(c["cost"].get<double>()) << " x "
                << fmt(c["probability"].get<double>()) << " = " << fmt(c["contribution"].get<double>()) << "\n";
        return;
    }
    if (verb == "whatif") {
        out << "revision " << b["revision"] << " (unchanged)\n" << engine_line(b["engine"]) << "\n";
        for (const char* branch : {"baseline", "hypothetical"}) {
            const auto& br = b[branch];
            out << branch << ": ";
            if (br.contains("error")) {
                out << "error: " << br["error"]["message"].get<std::string>() << "\n";
                continue;
            }
            out << fmt_vector(b["states"], br["posterior"]);
            if (br.contains("risk")) out << "  risk=" << fmt(br["risk"]["risk"].get<double>());
            out << "\n";
        }
        return;
    }
    if (verb == "consensus") {
        out << "pooled: " << fmt_vector(Json(), b["pooled"]) << "\n";
        if (!b["conflict"].is_null()) out << "conflict: " << fmt(b["conflict"].get<double>()) << "\n";
        return;
    }
    if (verb == "classify") {
        auto join = [](const Json& a) {
            std::string s;
            for (const auto& x : a) s += (s.empty() ? "" : " ") + x.get<std::string>();
            return s;
        };
        out << "usable: " << join(b["usable"]) << "\nhigh_risk: " << join(b["high_risk"]) << "\n";
        return;
    }
    if (verb == "validate") {
        for (const auto& w : b["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
        if (b["valid"].get<bool>()) {
            out << "valid\n";
        } else {
            for (const auto& v : b["violations"])
                out << v["variable"].get<std::string>() << ": " << v["message"].get<std::string>() << "\n";
        }
        return;
    }
    if (verb == "replay") {
        out << (b["matches"].get<bool>() ? "replay matches" : "replay MISMATCH") << " at revision " << b["revision"] << "\n";
        return;
    }
    out << b.dump(2) << "\n";
}

int emit(const Globals& g, const std::string& verb, const Response& res) {
    const bool ok = res.status >= 200 && res.status < 300;
    if (g.json) {
        std::cout << res.body.dump(2) << "\n";
    } else if (ok) {
        print_text(verb, res.body);
    } else {
        std::cerr << "error (" << res.body["error"]["code"].get<std::string>()
                  << "): " << res.body["error"]["message"].get<std::string>() << "\n";
    }
    if (ok && verb == "validate" && !res.body["valid"].get<bool>()) return 1;
    if (ok && verb == "replay" && !res.body["matches"].get<bool>()) return 1;
    return ok ? 0 : 1;
}

std::string encode(const std::string& s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epidemic preparedness decision support: Bayesian causal networks, graded evidence, risk and consensus"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--store", g.store, "Scenario store directory (default: $EPIDSS_STORE or ./epidss-store)");
    app.add_flag("--json", g.json, "Print the API response document");

    std::string verb;
    std::function<Response()> action;
    auto store_api = [&]() {
        static std::unique_ptr<epidss::service::ScenarioStore> store;
        static std::unique_ptr<Api> api;
        if (!api) {
            store = std::make_unique<epidss::service::ScenarioStore>(store_dir(g));
            api = std::make_unique<Api>(*store);
        }
        return api.get();
    };
    Api stateless;

    // template
    auto* tmpl = app.add_subcommand("template", "Print the shipped outbreak-risk network document");
    tmpl->callback([&] {
        verb = "template";
        action = [&] { return stateless.handle("GET", "/v1/template"); };
    });

    // validate
    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Validate a network document");
    validate->add_option("file", validate_file, "Network document")->required();
    validate->callback([&] {
        verb = "validate";
        action = [&] { return stateless.handle("POST", "/v1/validate", read_file(validate_file)); };
    });

    // scenario new|show|list
    auto* scenario = app.add_subcommand("scenario", "Create, show or list scenarios");
    scenario->require_subcommand(1);
    std::string new_name = "scenario", new_network;
    bool new_template = false;
    std::optional<std::uint64_t> new_seed;
    auto* sc_new = scenario->add_subcommand("new", "Create a scenario from a network document");
    sc_new->add_option("--name", new_name, "Scenario name");
    auto* net_opt = sc_new->add_option("--network", new_network, "Network document");
    sc_new->add_flag("--template", new_template, "Use the shipped outbreak-risk network")->excludes(net_opt);
    sc_new->add_option("--seed", new_seed, "Sampler seed recorded with the scenario");
    sc_new->callback([&] {
        verb = "scenario new";
        action = [&] {
            if (!new_template && new_network.empty())
                throw epidss::Error(epidss::ErrorCode::InvalidArgument, "give --network FILE or --template");
            Json net = new_template ? epidss::bayes::network_to_json(epidss::preparedness::default_outbreak_network())
                                    : Json::parse(read_file(new_network));
            Json body{{"name", new_name}, {"network", net}};
            if (new_seed) body["seed"] = *new_seed;
            return store_api()->handle("POST", "/v1/scenarios", body.dump());
        };
    });
    std::string show_id;
    auto* sc_show = scenario->add_subcommand("show", "Show a scenario");
    sc_show->add_option("id", show_id, "Scenario id")->required();
    sc_show->callback([&] {
        verb = "scenario show";
        action = [&] { return store_api()->handle("GET", "/v1/scenarios/" + encode(show_id)); };
    });
    auto* sc_list = scenario->add_subcommand("list", "List scenarios");
    sc_list->callback([&] {
        verb = "scenario list";
        action = [&] { return store_api()->handle("GET", "/v1/scenarios"); };
    });

    // evidence add
    auto* evidence = app.add_subcommand("evidence", "Submit graded evidence");
    evidence->require_subcommand(1);
    std::string ev_scenario, ev_grade = "A1", ev_source, ev_time;
    std::vector<std::string> ev_sets, ev_softs;
    auto* ev_add = evidence->add_subcommand("add", "Append one graded observation");
    ev_add->add_option("--scenario", ev_scenario, "Scenario id")->required();
    ev_add->add_option("--set", ev_sets, "Hard observation Var=state (repeatable)");
    ev_add->add_option("--soft", ev_softs, "Likelihood Var=l1,l2,... (repeatable)");
    ev_add->add_option("--grade", ev_grade, "Admiralty grade A1..F6")->capture_default_str();
    ev_add->add_option("--source", ev_source, "Source id");
    ev_add->add_option("--timestamp", ev_time, "ISO timestamp, e.g. 2024-05-01T12:00:00Z (default: now)");
    ev_add->callback([&] {
        verb = "evidence add";
        action = [&] {
            Json body{{"evidence", evidence_doc(ev_sets, ev_softs)}, {"grade", ev_grade}, {"source", ev_source}};
            if (!ev_time.empty()) body["timestamp"] = ev_time;
            return store_api()->handle("POST", "/v1/scenarios/" + encode(ev_scenario) + "/evidence", body.dump());
        };
    });

    // query
    std::string q_scenario, q_var;
    std::optional<std::uint64_t> q_revision;
    auto* query = app.add_subcommand("query", "Posterior of one variable (or all) at a revision");
    query->add_option("--scenario", q_scenario, "Scenario id")->required();
    query->add_option("--var", q_var, "Query variable (default: all)");
    query->add_option("--revision", q_revision, "Revision (default: latest)");
    query->callback([&] {
        verb = "query";
        action = [&] {
            std::string target = "/v1/scenarios/" + encode(q_scenario) + "/posterior?var=" + encode(q_var);
            if (q_revision) target += "&revision=" + std::to_string(*q_revision);
            return store_api()->handle("GET", target);
        };
    });

    // whatif
    std::string w_scenario, w_var, w_cost, w_grade = "A1";
    std::vector<std::string> w_sets, w_softs;
    auto* whatif = app.add_subcommand("whatif", "Compare baseline and hypothetical evidence without storing anything");
    whatif->add_option("--scenario", w_scenario, "Scenario id")->required();
    whatif->add_option("--var", w_var, "Query variable")->required();
    whatif->add_option("--set", w_sets, "Hypothetical observation Var=state (repeatable)");
    whatif->add_option("--soft", w_softs, "Hypothetical likelihood Var=l1,l2,... (repeatable)");
    whatif->add_option("--grade", w_grade, "Grade applied to the hypothetical evidence")->capture_default_str();
    whatif->add_option("--cost", w_cost, "Cost model name for side-by-side risk");
    whatif->callback([&] {
        verb = "whatif";
        action = [&] {
            Json body{{"var", w_var}, {"delta", evidence_doc(w_sets, w_softs)}, {"grade", w_grade}};
            if (!w_cost.empty()) body["cost"] = w_cost;
            return store_api()->handle("POST", "/v1/scenarios/" + encode(w_scenario) + "/whatif", body.dump());
        };
    });

    // cost set
    auto* cost = app.add_subcommand("cost", "Manage cost models");
    cost->require_subcommand(1);
    std::string c_scenario, c_name;
    std::vector<std::string> c_entries;
    auto* cost_set = cost->add_subcommand("set", "Store a cost model on a scenario");
    cost_set->add_option("--scenario", c_scenario, "Scenario id")->required();
    cost_set->add_option("--name", c_name, "Cost model name")->required();
    cost_set->add_option("--entry", c_entries, "Var:state=cost (repeatable)")->required();
    cost_set->callback([&] {
        verb = "cost set";
        action = [&] {
            Json model = Json::object();
            for (const auto& e : c_entries) {
                auto [key, value] = split_once(e, '=', "Var:state=cost");
                auto [var, state] = split_once(key, ':', "Var:state=cost");
                auto v = parse_numbers(value);
                if (v.size() != 1) throw epidss::Error(epidss::ErrorCode::Parse, "one cost per entry: '" + e + "'");
                model[var][state] = v[0];
            }
            return store_api()->handle("PUT", "/v1/scenarios/" + encode(c_scenario) + "/costs/" + encode(c_name),
                                       model.dump());
        };
    });

    // risk
    std::string r_scenario, r_var, r_cost;
    auto* risk = app.add_subcommand("risk", "Expected cost of a variable under a stored cost model");
    risk->add_option("--scenario", r_scenario, "Scenario id")->required();
    risk->add_option("--var", r_var, "Variable")->required();
    risk->add_option("--cost", r_cost, "Cost model name")->required();
    risk->callback([&] {
        verb = "risk";
        action = [&] {
            return store_api()->handle("GET", "/v1/scenarios/" + encode(r_scenario) + "/risk?var=" + encode(r_var) +
                                                  "&cost=" + encode(r_cost));
        };
    });

    // replay
    std::string rp_scenario;
    auto* replay = app.add_subcommand("replay", "Replay the evidence log and compare with the stored summary");
    replay->add_option("--scenario", rp_scenario, "Scenario id")->required();
    replay->callback([&] {
        verb = "replay";
        action = [&] { return store_api()->handle("GET", "/v1/scenarios/" + encode(rp_scenario) + "/replay"); };
    });

    // consensus
    std::vector<std::string> inputs;
    auto* consensus = app.add_subcommand("consensus", "Pool expert posteriors and report conflict");
    consensus->add_option("--inputs", inputs,
                          "Experts as id=p1,p2,...[@weight|@grade], or a JSON file with {\"experts\": [...]}")
        ->required();
    consensus->callback([&] {
        verb = "consensus";
        action = [&] {
            Json experts = Json::array();
            for (const auto& in : inputs) {
                if (in.size() > 5 && in.substr(in.size() - 5) == ".json") {
                    Json doc = Json::parse(read_file(in));
                    for (const auto& e : doc.contains("experts") ? doc["experts"] : Json::array({doc})) experts.push_back(e);
                    continue;
                }
                auto [id, rest] = split_once(in, '=', "id=p1,p2,...[@weight|@grade]");
                Json e{{"id", id}};
                auto at = rest.find('@');
                e["posterior"] = parse_numbers(rest.substr(0, at));
                if (at != std::string::npos) {
                    std::string w = rest.substr(at + 1);
                    if (w.size() == 2 && std::isalpha(static_cast<unsigned char>(w[0])))
                        e["grade"] = w;
                    else
                        e["weight"] = parse_numbers(w).at(0);
                }
                experts.push_back(e);
            }
            return stateless.handle("POST", "/v1/consensus", Json{{"experts", experts}}.dump());
        };
    });

    // classify
    std::vector<std::string> states;
    auto* classify = app.add_subcommand("classify", "Split graded system states into usable and high-risk");
    classify->add_option("--state", states, "State id=grade, e.g. S1=C1 (repeatable)")->required();
    classify->callback([&] {
        verb = "classify";
        action = [&] {
            Json list = Json::array();
            for (const auto& s : states) {
                auto [id, grade] = split_once(s, '=', "id=grade");
                list.push_back({{"id", id}, {"grade", grade}});
            }
            return stateless.handle("POST", "/v1/admiralty/classify", Json{{"states", list}}.dump());
        };
    });

    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the /v1 API over HTTP");
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--port", port, "Port")->capture_default_str();
    serve->callback([&] { verb = "serve"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (verb == "serve") {
            epidss::service::ScenarioStore store(store_dir(g));
            epidss::service::HttpServer server(store);
            std::cerr << "serving /v1 on http://" << host << ":" << port << " (store " << store.root().string() << ")\n";
            if (!server.listen(host, port)) {
                std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
                return 1;
            }
            return 0;
        }
        return emit(g, verb, action());
    } catch (const epidss::Error& e) {
        Response res{epidss::service::http_status(e.code()), epidss::service::error_body(e.code(), e.what())};
        return emit(g, verb, res);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
