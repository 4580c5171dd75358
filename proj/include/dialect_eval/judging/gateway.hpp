#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dialect_eval/retrieval/embedder.hpp"

namespace de::judging {

enum class ResponseFormat { Json, Text };

/// Free-form labels (stage, question_id, dialect, model, judge). Logged with
/// each attempt and visible to transports; never part of the request hash.
using RequestTags = std::map<std::string, std::string>;

struct GatewayRequest {
    std::string model_name;
    std::string prompt;
    ResponseFormat response_format_hint = ResponseFormat::Text;
    int max_attempts = 3;
    std::chrono::milliseconds timeout{60'000};
    double temperature = 0.0;
    RequestTags tags;

    /// sha256 over model, temperature, format and prompt.
    std::string request_hash() const;
};

struct EmbedRequest {
    std::string model_name;
    std::vector<std::string> texts;
    int max_attempts = 3;
    std::chrono::milliseconds timeout{60'000};
    RequestTags tags;

    std::string request_hash() const;
};

/// One wire attempt. Implementations throw GatewayFailure: transient for
/// timeouts, connection errors, 408/429/5xx; non-transient otherwise.
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string complete(const GatewayRequest& req) = 0;
    virtual std::vector<std::vector<double>> embed(const EmbedRequest& req) = 0;
};

struct AttemptRecord {
    std::string request_hash;
    std::string model;
    std::string kind;  // "chat" | "embed"
    int attempt = 0;
    std::string outcome;  // "ok" | "transient" | "fatal" | "killed"
    int status = 0;
    std::string message;
    double latency_ms = 0.0;
    RequestTags tags;
};

/// Append-serialized attempt log; optionally mirrored to an NDJSON file.
class AttemptLog {
public:
    AttemptLog() = default;
    explicit AttemptLog(const std::filesystem::path& path);

    void record(const AttemptRecord& rec);
    std::vector<AttemptRecord> records() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<AttemptRecord> records_;
    std::unique_ptr<std::ofstream> file_;
};

struct RetryPolicy {
    std::chrono::milliseconds base_delay{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{30'000};
    std::function<void(std::chrono::milliseconds)> sleep;

    std::chrono::milliseconds delay_for(int attempt) const;
};

/// Sends `req` through `transport`, retrying transient failures with
/// exponential backoff up to req.max_attempts. Errors: GatewayError (status)
/// for non-transient failures, ExhaustedRetries once attempts run out.
std::string call_gateway(Transport& transport, const GatewayRequest& req, AttemptLog& log,
                         const RetryPolicy& policy = {});

std::vector<std::vector<double>> call_embed(Transport& transport, const EmbedRequest& req, AttemptLog& log,
                                            const RetryPolicy& policy = {});

/// Chat-completion style HTTP transport.
///
///   POST {base}/v1/chat        {"model","messages":[{"role","content"}],"temperature","response_format"}
///                              -> {"text": "..."}
///   POST {base}/v1/embeddings  {"model","input":[...]} -> {"embeddings": [[...], ...]}
///
/// Bearer auth when a key is set.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string base_url, std::string api_key);

    /// Reads DE_GATEWAY_URL and DE_GATEWAY_KEY. Throws InvalidConfig when the
    /// URL is unset.
    static HttpTransport from_env();

    std::string complete(const GatewayRequest& req) override;
    std::vector<std::vector<double>> embed(const EmbedRequest& req) override;

    const std::string& base_url() const noexcept { return base_url_; }

private:
    std::string post(const std::string& path, const std::string& body, std::chrono::milliseconds timeout);

    std::string base_url_;
    std::string api_key_;
    std::string origin_;
    std::string prefix_;
};

/// Embedder backed by the gateway, batching requests.
class GatewayEmbedder final : public retrieval::Embedder {
public:
    GatewayEmbedder(Transport& transport, AttemptLog& log, std::string model, RetryPolicy policy = {},
                    std::size_t batch_size = 64, int max_attempts = 3);

    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
    std::string model_name() const override { return model_; }

private:
    Transport& transport_;
    AttemptLog& log_;
    std::string model_;
    RetryPolicy policy_;
    std::size_t batch_size_;
    int max_attempts_;
};

}  // namespace de::judging
