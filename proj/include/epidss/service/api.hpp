#pragma once

// Transport-independent /v1 API. The HTTP server and the CLI both go through
// Api::handle, so a document printed by `epidss --json` is byte-for-byte what
// the server would return.
//
//   GET  /v1/health
//   GET  /v1/template
//   POST /v1/validate                      {network}
//   GET  /v1/scenarios
//   POST /v1/scenarios                     {name, network, seed?}
//   GET  /v1/scenarios/{id}
//   GET  /v1/scenarios/{id}/network
//   POST /v1/scenarios/{id}/evidence       {evidence, grade, source, timestamp?}
//   GET  /v1/scenarios/{id}/posterior      ?var=&revision=
//   PUT  /v1/scenarios/{id}/costs/{name}   {var: {state: cost}}
//   GET  /v1/scenarios/{id}/risk           ?var=&cost=&revision=
//   POST /v1/scenarios/{id}/whatif         {delta, grade?, var, cost?, revision?}
//   GET  /v1/scenarios/{id}/replay
//   POST /v1/consensus                     {experts: [{id, posterior, weight | grade}]}
//   POST /v1/admiralty/classify            {states: [{id, grade}]}

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "epidss/admiralty.hpp"
#include "epidss/bayes/io.hpp"
#include "epidss/consensus.hpp"
#include "epidss/error.hpp"
#include "epidss/preparedness.hpp"
#include "epidss/risk_bias.hpp"
#include "epidss/service/engine.hpp"
#include "epidss/service/store.hpp"

namespace epidss::service {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    Json body;
};

inline int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::ContradictoryEvidence:
        case ErrorCode::Conflict: return 409;
        case ErrorCode::Io: return 500;
        default: return 400;
    }
}

inline Json error_body(ErrorCode code, const std::string& message) {
    return Json{{"error", {{"code", to_string(code)}, {"message", message}}}};
}

inline std::string url_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '+') {
            out += ' ';
        } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
                   std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
            out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

// Splits "/path?a=1&b=2" into a Request.
inline Request make_request(std::string method, std::string_view target, std::string body = {}) {
    Request r;
    r.method = std::move(method);
    r.body = std::move(body);
    auto q = target.find('?');
    r.path = std::string(target.substr(0, q));
    if (q != std::string_view::npos) {
        std::string_view rest = target.substr(q + 1);
        while (!rest.empty()) {
            auto amp = rest.find('&');
            auto pair = rest.substr(0, amp);
            auto eq = pair.find('=');
            if (!pair.empty())
                r.query[url_decode(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : url_decode(pair.substr(eq + 1));
            if (amp == std::string_view::npos) break;
            rest = rest.substr(amp + 1);
        }
    }
    return r;
}

inline Json risk_to_json(const risk::RiskAssessment& r) {
    Json contributions = Json::array();
    for (const auto& c : r.contributions)
        contributions.push_back(
            {{"state", c.state}, {"cost", c.cost}, {"probability", c.probability}, {"contribution", c.contribution}});
    return Json{{"variable", r.variable}, {"risk", r.risk}, {"contributions", contributions}, {"posterior", r.posterior}};
}

class Api {
public:
    explicit Api(ScenarioStore& store) : store_(&store) {}
    Api() = default; // stateless endpoints only

    Response handle(const Request& req) {
        try {
            return route(req);
        } catch (const Error& e) {
            return {http_status(e.code()), error_body(e.code(), e.what())};
        } catch (const nlohmann::json::exception& e) {
            return {400, error_body(ErrorCode::Parse, e.what())};
        } catch (const std::exception& e) {
            return {500, error_body(ErrorCode::Io, e.what())};
        }
    }

    Response handle(const std::string& method, std::string_view target, const std::string& body = {}) {
        return handle(make_request(method, target, body));
    }

private:
    static std::vector<std::string> segments(const std::string& path) {
        std::vector<std::string> out;
        std::size_t i = 0;
        while (i < path.size()) {
            auto j = path.find('/', i);
            if (j == std::string::npos) j = path.size();
            if (j > i) out.push_back(url_decode(std::string_view(path).substr(i, j - i)));
            i = j + 1;
        }
        return out;
    }

    static Json parse_body(const Request& req) {
        if (req.body.empty()) return Json::object();
        try {
            return Json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, std::string("request body is not valid JSON: ") + e.what());
        }
    }

    static std::string required(const std::map<std::string, std::string>& q, const std::string& key) {
        auto it = q.find(key);
        if (it == q.end() || it->second.empty()) throw Error(ErrorCode::InvalidArgument, "missing parameter '" + key + "'");
        return it->second;
    }

    static std::uint64_t revision_param(const std::map<std::string, std::string>& q, const Scenario& s) {
        auto it = q.find("revision");
        if (it == q.end() || it->second.empty()) return s.revision;
        try {
            return std::stoull(it->second);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "revision must be a positive integer");
        }
    }

    static Response method_not_allowed() {
        return {405, error_body(ErrorCode::InvalidArgument, "method not allowed")};
    }

    Response route(const Request& req) {
        auto seg = segments(req.path);
        if (seg.empty() || seg[0] != "v1") return {404, error_body(ErrorCode::NotFound, "no route " + req.path)};
        const std::string& m = req.method;

        if (seg.size() == 2 && seg[1] == "health") return {200, Json{{"status", "ok"}}};
        if (seg.size() == 2 && seg[1] == "template") {
            if (m != "GET") return method_not_allowed();
            return {200, bayes::network_to_json(preparedness::default_outbreak_network())};
        }
        if (seg.size() == 2 && seg[1] == "validate") {
            if (m != "POST") return method_not_allowed();
            return {200, validate(parse_body(req))};
        }
        if (seg.size() == 2 && seg[1] == "consensus") {
            if (m != "POST") return method_not_allowed();
            return {200, consensus_query(parse_body(req))};
        }
        if (seg.size() == 3 && seg[1] == "admiralty" && seg[2] == "classify") {
            if (m != "POST") return method_not_allowed();
            return {200, classify_query(parse_body(req))};
        }
        if (seg.size() >= 2 && seg[1] == "scenarios") {
            if (!store_) throw Error(ErrorCode::Io, "no scenario store configured");
            return scenarios(req, seg);
        }
        return {404, error_body(ErrorCode::NotFound, "no route " + req.path)};
    }

    Response scenarios(const Request& req, const std::vector<std::string>& seg) {
        const std::string& m = req.method;
        if (seg.size() == 2) {
            if (m == "GET") {
                Json list = Json::array();
                for (const auto& id : store_->list()) {
                    auto s = store_->load(id);
                    list.push_back({{"id", s.id}, {"name", s.name}, {"revision", s.revision}});
                }
                return {200, Json{{"scenarios", list}}};
            }
            if (m == "POST") return create(parse_body(req));
            return method_not_allowed();
        }
        const std::string& id = seg[2];
        if (seg.size() == 3) {
            if (m != "GET") return method_not_allowed();
            return {200, to_json(store_->load(id))};
        }
        const std::string& what = seg[3];
        if (seg.size() == 4 && what == "network") {
            if (m != "GET") return method_not_allowed();
            return {200, bayes::network_to_json(store_->load(id).network)};
        }
        if (seg.size() == 4 && what == "evidence") {
            if (m == "GET") {
                auto s = store_->load(id);
                return {200, to_json(s)["evidence"]};
            }
            if (m != "POST") return method_not_allowed();
            auto s = store_->append_evidence(id, graded_from_json(parse_body(req)));
            return {201, Json{{"id", s.id}, {"revision", s.revision}, {"summary", to_json(s.network, s.summary)}}};
        }
        if (seg.size() == 4 && what == "posterior") {
            if (m != "GET") return method_not_allowed();
            return {200, posterior_query(store_->load(id), req.query)};
        }
        if (seg.size() == 5 && what == "costs") {
            if (m != "PUT") return method_not_allowed();
            auto s = store_->set_cost(id, seg[4], cost_model_from_json(parse_body(req)));
            return {200, Json{{"id", s.id}, {"revision", s.revision}, {"cost", seg[4]}, {"model", to_json(s.costs.at(seg[4]))}}};
        }
        if (seg.size() == 4 && what == "risk") {
            if (m != "GET") return method_not_allowed();
            return {200, risk_query(store_->load(id), req.query)};
        }
        if (seg.size() == 4 && what == "whatif") {
            if (m != "POST") return method_not_allowed();
            return {200, what_if(store_->load(id), parse_body(req))};
        }
        if (seg.size() == 4 && what == "replay") {
            if (m != "GET") return method_not_allowed();
            auto s = store_->load(id);
            return {200, Json{{"id", s.id}, {"revision", s.revision}, {"matches", replay_matches(s)}}};
        }
        return {404, error_body(ErrorCode::NotFound, "no route " + req.path)};
    }

    Response create(const Json& body) {
        if (!body.contains("network")) throw Error(ErrorCode::InvalidArgument, "missing 'network'");
        auto loaded = bayes::network_from_json(body.at("network"));
        std::optional<std::uint64_t> seed;
        if (body.contains("seed")) seed = body.at("seed").get<std::uint64_t>();
        auto s = store_->create(body.value("name", std::string("scenario")), loaded.network, seed);
        return {201, Json{{"id", s.id},
                          {"name", s.name},
                          {"revision", s.revision},
                          {"warnings", loaded.warnings},
                          {"engine", to_json(s.summary.engine)}}};
    }

    static Json validate(const Json& body) {
        auto loaded = bayes::network_from_json(body.contains("network") ? body.at("network") : body);
        Json violations = Json::array();
        for (const auto& v : bayes::validate_network(loaded.network))
            violations.push_back({{"variable", v.variable}, {"message", v.message}});
        return Json{{"valid", violations.empty()}, {"violations", violations}, {"warnings", loaded.warnings}};
    }

    static Json posterior_query(const Scenario& s, const std::map<std::string, std::string>& q) {
        auto rev = revision_param(q, s);
        auto summary = rev == s.revision ? s.summary : compute_summary(s, rev);
        summary.revision = rev;
        Json out{{"id", s.id}, {"revision", rev}, {"engine", to_json(summary.engine)}};
        auto var = q.find("var");
        if (var == q.end() || var->second.empty()) {
            out["posteriors"] = posteriors_to_json(s.network, summary.posteriors);
        } else {
            s.network.variable(var->second);
            out["variable"] = var->second;
            out["states"] = s.network.variable(var->second).states;
            out["posterior"] = summary.posteriors.at(var->second);
        }
        return out;
    }

    static Json risk_query(const Scenario& s, const std::map<std::string, std::string>& q) {
        auto rev = revision_param(q, s);
        auto summary = rev == s.revision ? s.summary : compute_summary(s, rev);
        const auto var = required(q, "var");
        const auto cost = required(q, "cost");
        auto it = s.costs.find(cost);
        if (it == s.costs.end()) throw Error(ErrorCode::NotFound, "no cost model '" + cost + "' in scenario '" + s.id + "'");
        const auto& v = s.network.variable(var);
        Json out{{"id", s.id}, {"revision", rev}, {"engine", to_json(summary.engine)}, {"cost", cost}};
        out.update(risk_to_json(risk::risk_score(it->second, summary.posteriors.at(var), v)));
        return out;
    }

    // Both branches use the stored engine settings and seed; nothing is written.
    static Json what_if(const Scenario& s, const Json& body) {
        const auto var = body.at("var").get<std::string>();
        const auto& v = s.network.variable(var);
        std::uint64_t rev = body.contains("revision") ? body.at("revision").get<std::uint64_t>() : s.revision;
        EPIDSS_REQUIRE(rev >= 1 && rev <= s.revision, ErrorCode::NotFound, "no revision " + std::to_string(rev));
        const risk::CostModel* cost = nullptr;
        std::string cost_name = body.value("cost", std::string());
        if (!cost_name.empty()) {
            auto it = s.costs.find(cost_name);
            if (it == s.costs.end()) throw Error(ErrorCode::NotFound, "no cost model '" + cost_name + "'");
            cost = &it->second;
        }
        admiralty::GradedEvidence delta;
        delta.evidence = bayes::evidence_from_json(body.value("delta", Json::object()));
        delta.grade = admiralty::parse_grade(body.value("grade", std::string("A1")));

        bayes::CompiledNetwork compiled(s.network);
        const EngineInfo engine = choose_engine(compiled, s.seed);
        const bayes::Evidence baseline = evidence_at(s, rev);

        auto branch = [&](auto make_evidence) {
            Json b;
            try {
                bayes::Evidence ev = make_evidence();
                require_consistent(ev);
                auto p = service::posterior(compiled, ev, var, engine);
                b["posterior"] = p;
                if (cost) b["risk"] = risk_to_json(risk::risk_score(*cost, p, v));
            } catch (const Error& e) {
                b["error"] = error_body(e.code(), e.what())["error"];
            }
            return b;
        };
        Json out{{"id", s.id}, {"revision", s.revision}, {"engine", to_json(engine)}, {"variable", var}, {"states", v.states}};
        out["delta"] = bayes::evidence_to_json(delta.evidence);
        out["grade"] = admiralty::to_string(delta.grade);
        out["baseline"] = branch([&] { return baseline; });
        out["hypothetical"] = branch([&] {
            return admiralty::combine_soft(baseline, admiralty::discount_to_likelihood(delta, s.network));
        });
        return out;
    }

    static Json consensus_query(const Json& body) {
        std::vector<consensus::ExpertPosterior> experts;
        Json echo = Json::array();
        for (const auto& e : body.at("experts")) {
            consensus::ExpertPosterior x;
            x.expert_id = e.value("id", std::string("expert") + std::to_string(experts.size() + 1));
            x.posterior = e.at("posterior").get<std::vector<double>>();
            if (e.contains("grade"))
                x.weight = admiralty::parse_grade(e.at("grade").get<std::string>());
            else
                x.weight = e.value("weight", 1.0);
            echo.push_back({{"id", x.expert_id}, {"weight", x.resolved_weight()}});
            experts.push_back(std::move(x));
        }
        const std::string method = body.value("method", std::string("linear"));
        EPIDSS_REQUIRE(method == "linear", ErrorCode::InvalidArgument, "unknown pooling method '" + method + "'");
        Json out{{"method", method}, {"pooled", consensus::pool(experts)}};
        out["conflict"] = experts.size() >= 2 ? Json(consensus::conflict(experts)) : Json(nullptr);
        out["experts"] = echo;
        return out;
    }

    static Json classify_query(const Json& body) {
        std::vector<admiralty::SystemState> states;
        for (const auto& s : body.at("states"))
            states.push_back({s.at("id").get<std::string>(), admiralty::parse_grade(s.at("grade").get<std::string>())});
        auto part = admiralty::classify_states(states);
        Json cells = Json::array();
        for (auto g : admiralty::all_grades()) {
            Json ids = Json::array();
            for (const auto& s : states)
                if (s.grade == g) ids.push_back(s.id);
            cells.push_back({{"grade", admiralty::to_string(g)},
                             {"weight", admiralty::grade_weight(g)},
                             {"high_risk", admiralty::is_high_risk(g)},
                             {"states", ids}});
        }
        return Json{{"usable", part.usable}, {"high_risk", part.high_risk}, {"cells", cells}};
    }

    ScenarioStore* store_ = nullptr;
};

} // namespace epidss::service
