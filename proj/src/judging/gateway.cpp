#include "dialect_eval/judging/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/hash.hpp"

namespace de::judging {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string GatewayRequest::request_hash() const {
    json j = {{"model", model_name},
              {"temperature", temperature},
              {"format", response_format_hint == ResponseFormat::Json ? "json" : "text"},
              {"prompt", prompt}};
    return sha256_hex(j.dump());
}

std::string EmbedRequest::request_hash() const {
    return sha256_hex(json{{"model", model_name}, {"input", texts}}.dump());
}

AttemptLog::AttemptLog(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
    if (!*file_) throw Error(Errc::Io, "cannot open attempt log " + path.string());
}

void AttemptLog::record(const AttemptRecord& rec) {
    std::lock_guard lock(mu_);
    records_.push_back(rec);
    if (file_) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        json j = {{"ts_ms", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
                  {"request_hash", rec.request_hash},
                  {"model", rec.model},
                  {"kind", rec.kind},
                  {"attempt", rec.attempt},
                  {"outcome", rec.outcome},
                  {"status", rec.status},
                  {"message", rec.message},
                  {"latency_ms", rec.latency_ms},
                  {"tags", rec.tags}};
        *file_ << j.dump() << '\n';
        file_->flush();
    }
}

std::vector<AttemptRecord> AttemptLog::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::size_t AttemptLog::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::chrono::milliseconds RetryPolicy::delay_for(int attempt) const {
    const double factor = std::pow(multiplier, std::max(0, attempt - 1));
    const double ms = std::min(static_cast<double>(base_delay.count()) * factor, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds(static_cast<long long>(ms));
}

namespace {

template <typename Req, typename Fn>
auto with_retries(const Req& req, const char* kind, AttemptLog& log, const RetryPolicy& policy, Fn&& send)
    -> decltype(send()) {
    if (req.max_attempts < 1) throw Error(Errc::InvalidArgument, "max_attempts must be at least 1");
    const std::string hash = req.request_hash();
    std::string last_error;
    int last_status = 0;
    for (int attempt = 1; attempt <= req.max_attempts; ++attempt) {
        AttemptRecord rec{hash, req.model_name, kind, attempt, "ok", 200, "", 0.0, req.tags};
        const auto started = Clock::now();
        auto elapsed = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - started).count(); };
        try {
            auto result = send();
            rec.latency_ms = elapsed();
            log.record(rec);
            return result;
        } catch (const GatewayFailure& f) {
            rec.latency_ms = elapsed();
            rec.status = f.status();
            rec.message = f.what();
            rec.outcome = f.transient() ? "transient" : "fatal";
            log.record(rec);
            if (!f.transient()) throw;
            last_error = f.what();
            last_status = f.status();
            spdlog::debug("gateway attempt {}/{} for {} failed: {}", attempt, req.max_attempts, req.model_name,
                          last_error);
        } catch (const Error& e) {
            rec.latency_ms = elapsed();
            rec.outcome = e.code() == Errc::Killed ? "killed" : "fatal";
            rec.status = 0;
            rec.message = e.what();
            log.record(rec);
            throw;
        }
        if (attempt < req.max_attempts) {
            const auto delay = policy.delay_for(attempt);
            if (policy.sleep) {
                policy.sleep(delay);
            } else {
                std::this_thread::sleep_for(delay);
            }
        }
    }
    throw GatewayFailure(Errc::ExhaustedRetries,
                         std::to_string(req.max_attempts) + " attempts failed; last: " + last_error, last_status,
                         false);
}

}  // namespace

std::string call_gateway(Transport& transport, const GatewayRequest& req, AttemptLog& log, const RetryPolicy& policy) {
    return with_retries(req, "chat", log, policy, [&] { return transport.complete(req); });
}

std::vector<std::vector<double>> call_embed(Transport& transport, const EmbedRequest& req, AttemptLog& log,
                                            const RetryPolicy& policy) {
    return with_retries(req, "embed", log, policy, [&] {
        auto vectors = transport.embed(req);
        if (vectors.size() != req.texts.size()) {
            throw GatewayFailure(Errc::GatewayError, "embedding count does not match input count", 200, false);
        }
        return vectors;
    });
}

GatewayEmbedder::GatewayEmbedder(Transport& transport, AttemptLog& log, std::string model, RetryPolicy policy,
                                 std::size_t batch_size, int max_attempts)
    : transport_(transport),
      log_(log),
      model_(std::move(model)),
      policy_(std::move(policy)),
      batch_size_(std::max<std::size_t>(1, batch_size)),
      max_attempts_(max_attempts) {}

std::vector<std::vector<double>> GatewayEmbedder::embed(std::span<const std::string> texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
        const std::size_t end = std::min(texts.size(), start + batch_size_);
        EmbedRequest req;
        req.model_name = model_;
        req.texts.assign(texts.begin() + static_cast<std::ptrdiff_t>(start),
                         texts.begin() + static_cast<std::ptrdiff_t>(end));
        req.max_attempts = max_attempts_;
        req.tags = {{"stage", "embed"}};
        for (auto& v : call_embed(transport_, req, log_, policy_)) out.push_back(std::move(v));
    }
    return out;
}

}  // namespace de::judging
