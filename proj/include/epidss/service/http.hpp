#pragma once

// HTTP front end: every /v1 request is forwarded verbatim to Api::handle.

#include <memory>
#include <string>

#include "httplib.h"

#include "epidss/service/api.hpp"

namespace epidss::service {

class HttpServer {
public:
    explicit HttpServer(ScenarioStore& store) : api_(store) {
        auto forward = [this](const httplib::Request& req, httplib::Response& res) {
            Request r;
            r.method = req.method;
            r.path = req.path;
            for (const auto& [k, v] : req.params) r.query[k] = v;
            r.body = req.body;
            auto out = api_.handle(r);
            res.status = out.status;
            res.set_content(out.body.dump(2) + "\n", "application/json");
        };
        const std::string pattern = R"(/v1(/.*)?)";
        server_.Get(pattern, forward);
        server_.Post(pattern, forward);
        server_.Put(pattern, forward);
        server_.Delete(pattern, forward);
    }

    // Binds and serves until stop(); returns false if the port is unavailable.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    // Binds an ephemeral port; serve with listen_after_bind().
    int bind_any_port(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }
    bool running() const { return server_.is_running(); }

private:
    Api api_;
    httplib::Server server_;
};

} // namespace epidss::service
