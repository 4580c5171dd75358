#include <httplib.h>

#include <spdlog/spdlog.h>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/pipeline/review.hpp"

namespace de::pipeline {

struct ReviewServer::Impl {
    Impl(ReviewService& s, ServeOptions o) : service(s), options(std::move(o)) {}

    ReviewService& service;
    ServeOptions options;
    httplib::Server server;
    int port = -1;
};

namespace {

void reply(httplib::Response& res, const ReviewResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

}  // namespace

ReviewServer::ReviewServer(ReviewService& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
    auto& srv = impl_->server;
    auto& svc = impl_->service;
    const std::string token = impl_->options.token;

    srv.set_pre_routing_handler([token](const httplib::Request& req, httplib::Response& res) {
        if (token.empty()) return httplib::Server::HandlerResponse::Unhandled;
        if (req.get_header_value("Authorization") == "Bearer " + token) {
            return httplib::Server::HandlerResponse::Unhandled;
        }
        reply(res, {401, {{"error", "missing or wrong bearer token"}}});
        return httplib::Server::HandlerResponse::Handled;
    });
    srv.Get("/api/queue", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.queue(req.get_param_value("status")));
    });
    srv.Get(R"(/api/item/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.item(req.matches[1]));
    });
    srv.Post("/api/verdict", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.submit(req.body));
    });
    srv.Get("/api/progress", [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.progress()); });
    srv.Get("/api/weights", [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.weights()); });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string msg = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            msg = e.what();
        } catch (...) {
        }
        reply(res, {500, {{"error", msg}}});
    });
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind() {
    auto& o = impl_->options;
    impl_->port = o.port == 0 ? impl_->server.bind_to_any_port(o.host) : (impl_->server.bind_to_port(o.host, o.port) ? o.port : -1);
    if (impl_->port < 0) throw Error(Errc::BindError, "cannot bind " + o.host + ":" + std::to_string(o.port));
    spdlog::info("review API on http://{}:{}", o.host, impl_->port);
    return impl_->port;
}

void ReviewServer::listen() {
    if (impl_->port < 0) bind();
    impl_->server.listen_after_bind();
}

void ReviewServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace de::pipeline
