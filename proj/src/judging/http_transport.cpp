#include <httplib.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/judging/gateway.hpp"

namespace de::judging {

using json = nlohmann::json;

namespace {

bool transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpTransport::HttpTransport(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
    const auto scheme = base_url_.find("://");
    if (scheme == std::string::npos) throw Error(Errc::InvalidConfig, "gateway URL needs a scheme: " + base_url_);
    const auto path = base_url_.find('/', scheme + 3);
    origin_ = base_url_.substr(0, path);
    prefix_ = path == std::string::npos ? "" : base_url_.substr(path);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

HttpTransport HttpTransport::from_env() {
    const char* url = std::getenv("DE_GATEWAY_URL");
    if (url == nullptr || *url == '\0') throw Error(Errc::InvalidConfig, "DE_GATEWAY_URL is not set");
    const char* key = std::getenv("DE_GATEWAY_KEY");
    return HttpTransport(url, key == nullptr ? "" : key);
}

std::string HttpTransport::post(const std::string& path, const std::string& body, std::chrono::milliseconds timeout) {
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(prefix_ + path, headers, body, "application/json");
    if (!res) {
        const auto err = res.error();
        const bool timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout ||
                               err == httplib::Error::Write;
        throw GatewayFailure(timed_out ? Errc::Timeout : Errc::GatewayError,
                             "transport error: " + httplib::to_string(err), 0, true);
    }
    if (res->status != 200) {
        throw GatewayFailure(Errc::GatewayError, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200),
                             res->status, transient_status(res->status));
    }
    return res->body;
}

std::string HttpTransport::complete(const GatewayRequest& req) {
    json body = {{"model", req.model_name},
                 {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
                 {"temperature", req.temperature},
                 {"response_format", req.response_format_hint == ResponseFormat::Json ? "json" : "text"}};
    const std::string raw = post("/v1/chat", body.dump(), req.timeout);
    try {
        return json::parse(raw).at("text").get<std::string>();
    } catch (const json::exception& e) {
        throw GatewayFailure(Errc::GatewayError, std::string("malformed gateway response: ") + e.what(), 200, false);
    }
}

std::vector<std::vector<double>> HttpTransport::embed(const EmbedRequest& req) {
    json body = {{"model", req.model_name}, {"input", req.texts}};
    const std::string raw = post("/v1/embeddings", body.dump(), req.timeout);
    try {
        return json::parse(raw).at("embeddings").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw GatewayFailure(Errc::GatewayError, std::string("malformed embedding response: ") + e.what(), 200, false);
    }
}

}  // namespace de::judging
