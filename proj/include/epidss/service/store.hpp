#pragma once

// Scenario persistence: one JSON document per scenario in a flat directory.
// Every write goes to a temp file that is fsynced and renamed over the old
// document, so a reader or a reopened store sees the old revision or the new
// one and never a torn file. Writers are serialized per scenario id.

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "epidss/admiralty.hpp"
#include "epidss/bayes/compiled.hpp"
#include "epidss/bayes/io.hpp"
#include "epidss/error.hpp"
#include "epidss/risk_bias.hpp"
#include "epidss/rng.hpp"
#include "epidss/service/engine.hpp"

namespace epidss::service {

namespace fs = std::filesystem;

struct LogEntry {
    std::uint64_t revision = 0; // revision created by this append
    admiralty::GradedEvidence observation;

    friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct PosteriorSummary {
    std::uint64_t revision = 0;
    EngineInfo engine;
    std::map<std::string, std::vector<double>> posteriors;

    friend bool operator==(const PosteriorSummary&, const PosteriorSummary&) = default;
};

struct Scenario {
    std::string id;
    std::string name;
    std::uint64_t revision = 1;
    admiralty::Timestamp created{};
    admiralty::Timestamp updated{};
    std::uint64_t seed = 0;
    bayes::CausalNetwork network;
    std::vector<LogEntry> evidence;
    std::map<std::string, risk::CostModel> costs;
    PosteriorSummary summary;
};

// --- codec -------------------------------------------------------------------

inline Json to_json(const admiralty::GradedEvidence& ge) {
    return Json{{"grade", admiralty::to_string(ge.grade)},
                {"source", ge.source_id},
                {"timestamp", admiralty::format_timestamp(ge.timestamp)},
                {"evidence", bayes::evidence_to_json(ge.evidence)}};
}

inline admiralty::GradedEvidence graded_from_json(const Json& j) {
    admiralty::GradedEvidence ge;
    try {
        ge.evidence = bayes::evidence_from_json(j.at("evidence"));
        ge.grade = admiralty::parse_grade(j.value("grade", std::string("A1")));
        ge.source_id = j.value("source", std::string());
        ge.timestamp = j.contains("timestamp") ? admiralty::parse_timestamp(j.at("timestamp").get<std::string>())
                                               : admiralty::now();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed graded evidence: ") + e.what());
    }
    return ge;
}

inline Json to_json(const risk::CostModel& c) {
    Json j = Json::object();
    for (const auto& [var, states] : c.costs) {
        j[var] = Json::object();
        for (const auto& [state, cost] : states) j[var][state] = cost;
    }
    return j;
}

inline risk::CostModel cost_model_from_json(const Json& j) {
    risk::CostModel c;
    try {
        for (const auto& [var, states] : j.items())
            for (const auto& [state, cost] : states.items()) c.set(var, state, cost.get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed cost model: ") + e.what());
    }
    return c;
}

// Posteriors listed in network variable order.
inline Json posteriors_to_json(const bayes::CausalNetwork& net,
                               const std::map<std::string, std::vector<double>>& posteriors) {
    Json j = Json::object();
    for (const auto& v : net.variables)
        if (auto it = posteriors.find(v.id); it != posteriors.end()) j[v.id] = it->second;
    return j;
}

inline Json to_json(const bayes::CausalNetwork& net, const PosteriorSummary& s) {
    return Json{{"revision", s.revision}, {"engine", to_json(s.engine)}, {"posteriors", posteriors_to_json(net, s.posteriors)}};
}

inline Json to_json(const Scenario& s) {
    Json j;
    j["id"] = s.id;
    j["name"] = s.name;
    j["revision"] = s.revision;
    j["created"] = admiralty::format_timestamp(s.created);
    j["updated"] = admiralty::format_timestamp(s.updated);
    j["seed"] = s.seed;
    j["network"] = bayes::network_to_json(s.network);
    j["evidence"] = Json::array();
    for (const auto& e : s.evidence) {
        Json entry{{"revision", e.revision}};
        entry.update(to_json(e.observation));
        j["evidence"].push_back(std::move(entry));
    }
    j["costs"] = Json::object();
    for (const auto& [name, c] : s.costs) j["costs"][name] = to_json(c);
    j["summary"] = to_json(s.network, s.summary);
    return j;
}

inline Scenario scenario_from_json(const Json& j) {
    Scenario s;
    try {
        s.id = j.at("id").get<std::string>();
        s.name = j.at("name").get<std::string>();
        s.revision = j.at("revision").get<std::uint64_t>();
        s.created = admiralty::parse_timestamp(j.at("created").get<std::string>());
        s.updated = admiralty::parse_timestamp(j.at("updated").get<std::string>());
        s.seed = j.at("seed").get<std::uint64_t>();
        s.network = bayes::network_from_json(j.at("network")).network;
        for (const auto& e : j.at("evidence")) s.evidence.push_back({e.at("revision").get<std::uint64_t>(), graded_from_json(e)});
        for (const auto& [name, c] : j.at("costs").items()) s.costs[name] = cost_model_from_json(c);
        const auto& sum = j.at("summary");
        s.summary.revision = sum.at("revision").get<std::uint64_t>();
        s.summary.engine = engine_from_json(sum.at("engine"));
        for (const auto& [var, p] : sum.at("posteriors").items()) s.summary.posteriors[var] = p.get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed scenario document: ") + e.what());
    }
    return s;
}

// --- replay ------------------------------------------------------------------

// Discounted likelihoods of every log entry up to `revision`.
inline bayes::Evidence evidence_at(const Scenario& s, std::uint64_t revision) {
    bayes::Evidence acc;
    for (const auto& e : s.evidence)
        if (e.revision <= revision) acc = admiralty::combine_soft(acc, admiralty::discount_to_likelihood(e.observation, s.network));
    return acc;
}

inline void require_consistent(const bayes::Evidence& ev) {
    for (const auto& [id, lik] : ev.soft) {
        bool all_zero = true;
        for (double x : lik) all_zero = all_zero && x == 0.0;
        if (all_zero)
            throw Error(ErrorCode::ContradictoryEvidence,
                        "observations on '" + id + "' contradict each other (zero probability)");
    }
}

inline PosteriorSummary compute_summary(const Scenario& s, std::uint64_t revision) {
    EPIDSS_REQUIRE(revision >= 1 && revision <= s.revision, ErrorCode::NotFound,
                   "scenario '" + s.id + "' has no revision " + std::to_string(revision));
    bayes::CompiledNetwork compiled(s.network);
    auto ev = evidence_at(s, revision);
    require_consistent(ev);
    PosteriorSummary out;
    out.revision = revision;
    out.engine = choose_engine(compiled, s.seed);
    out.posteriors = all_posteriors(compiled, ev, out.engine);
    return out;
}

// Replays the whole log and compares with the stored summary, bit for bit.
inline bool replay_matches(const Scenario& s) {
    auto replayed = compute_summary(s, s.revision);
    replayed.revision = s.summary.revision;
    return replayed == s.summary;
}

// --- store -------------------------------------------------------------------

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
    return h;
}

inline bool valid_scenario_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
    return true;
}

class ScenarioStore {
public:
    explicit ScenarioStore(fs::path root) : root_(std::move(root)) {
        std::error_code ec;
        fs::create_directories(root_, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create store directory " + root_.string() + ": " + ec.message());
        // Leftovers of interrupted writes; the committed document is intact.
        for (const auto& entry : fs::directory_iterator(root_))
            if (entry.path().filename().string().find(".tmp") != std::string::npos) fs::remove(entry.path(), ec);
    }

    const fs::path& root() const noexcept { return root_; }

    Scenario create(const std::string& name, const bayes::CausalNetwork& network,
                    std::optional<std::uint64_t> seed = std::nullopt) {
        auto report = bayes::validate_network(network);
        if (!report.empty()) throw Error(ErrorCode::InvalidNetwork, bayes::to_string(report));
        Scenario s;
        s.name = name;
        s.network = network;
        s.created = s.updated = admiralty::now();
        s.revision = 1;
        std::lock_guard<std::mutex> guard(create_mutex_);
        do {
            s.id = fresh_id();
        } while (fs::exists(path_of(s.id)));
        s.seed = seed.value_or(splitmix64(fnv1a(s.id)));
        s.summary = compute_summary(s, 1);
        write(s);
        return s;
    }

    bool exists(const std::string& id) const { return valid_scenario_id(id) && fs::exists(path_of(id)); }

    Scenario load(const std::string& id) const {
        if (!exists(id)) throw Error(ErrorCode::NotFound, "no scenario '" + id + "'");
        std::ifstream in(path_of(id), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        Json doc;
        try {
            doc = Json::parse(ss.str());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, "scenario '" + id + "' is not valid JSON: " + e.what());
        }
        return scenario_from_json(doc);
    }

    std::vector<std::string> list() const {
        std::vector<std::string> ids;
        for (const auto& entry : fs::directory_iterator(root_))
            if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    // Appends one observation. Contradictory or invalid evidence leaves the
    // stored scenario untouched.
    Scenario append_evidence(const std::string& id, const admiralty::GradedEvidence& ge) {
        auto lock = lock_for(id);
        Scenario s = load(id);
        admiralty::discount_to_likelihood(ge, s.network); // validates variables, states, lengths
        s.evidence.push_back({s.revision + 1, ge});
        s.revision += 1;
        s.summary = compute_summary(s, s.revision);
        s.updated = admiralty::now();
        write(s);
        return s;
    }

    Scenario set_cost(const std::string& id, const std::string& name, const risk::CostModel& cost) {
        EPIDSS_REQUIRE(!name.empty(), ErrorCode::InvalidArgument, "cost model name is empty");
        auto lock = lock_for(id);
        Scenario s = load(id);
        for (const auto& [var, states] : cost.costs) {
            const auto& v = s.network.variable(var);
            for (const auto& [state, _] : states)
                if (!v.state_index(state))
                    throw Error(ErrorCode::UnknownState, "unknown state '" + state + "' for variable '" + var + "'");
        }
        s.costs[name] = cost;
        s.revision += 1;
        s.summary.revision = s.revision; // evidence unchanged, posteriors carry over
        s.updated = admiralty::now();
        write(s);
        return s;
    }

private:
    fs::path path_of(const std::string& id) const { return root_ / (id + ".json"); }

    // Per-id mutexes are never erased, so the reference outlives the map lock.
    std::unique_lock<std::mutex> lock_for(const std::string& id) {
        std::mutex* m = nullptr;
        {
            std::lock_guard<std::mutex> guard(locks_mutex_);
            auto& slot = locks_[id];
            if (!slot) slot = std::make_unique<std::mutex>();
            m = slot.get();
        }
        return std::unique_lock<std::mutex>(*m);
    }

    std::string fresh_id() {
        thread_local std::mt19937_64 rng(std::random_device{}() ^ (static_cast<std::uint64_t>(::getpid()) << 32));
        char buf[32];
        std::snprintf(buf, sizeof buf, "sc-%012llx", static_cast<unsigned long long>(rng() & 0xffffffffffffull));
        return buf;
    }

    void write(const Scenario& s) const {
        const std::string text = to_json(s).dump(2) + "\n";
        const fs::path final_path = path_of(s.id);
        const fs::path tmp = root_ / (s.id + ".json.tmp." + std::to_string(::getpid()) + "." +
                                      std::to_string(counter_.fetch_add(1)));
        int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd < 0) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        const char* p = text.data();
        std::size_t left = text.size();
        while (left > 0) {
            ssize_t n = ::write(fd, p, left);
            if (n <= 0) {
                ::close(fd);
                fs::remove(tmp);
                throw Error(ErrorCode::Io, "short write to " + tmp.string());
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
        ::fsync(fd);
        ::close(fd);
        std::error_code ec;
        fs::rename(tmp, final_path, ec);
        if (ec) {
            fs::remove(tmp);
            throw Error(ErrorCode::Io, "cannot commit " + final_path.string() + ": " + ec.message());
        }
        int dir = ::open(root_.c_str(), O_RDONLY | O_DIRECTORY);
        if (dir >= 0) {
            ::fsync(dir);
            ::close(dir);
        }
    }

    fs::path root_;
    std::mutex create_mutex_;
    std::mutex locks_mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>> locks_;
    mutable std::atomic<std::uint64_t> counter_{0};
};

} // namespace epidss::service
