#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dialect_eval/judging/gateway.hpp"
#include "dialect_eval/pipeline/config.hpp"
#include "dialect_eval/pipeline/verdicts.hpp"

namespace de::pipeline {

struct StageSummary {
    std::string stage;
    std::size_t total = 0;    // items the stage is responsible for
    std::size_t skipped = 0;  // already completed before this invocation
    std::size_t written = 0;
    std::size_t failed = 0;   // sentinel rows written now
};

/// Files of one run under <workdir>/<run_id>/.
struct RunPaths {
    std::filesystem::path dir;

    std::filesystem::path config() const { return dir / "config.json"; }
    std::filesystem::path index_dir() const { return dir / "index"; }
    std::filesystem::path manifest() const { return index_dir() / "manifest.json"; }
    std::filesystem::path translations() const { return dir / "translations.jsonl"; }
    std::filesystem::path standard_responses() const { return dir / "standard_responses.jsonl"; }
    std::filesystem::path responses() const { return dir / "responses.jsonl"; }
    std::filesystem::path verdicts() const { return dir / "verdicts.jsonl"; }
    std::filesystem::path fallback() const { return dir / "fallback.jsonl"; }
    std::filesystem::path attempts() const { return dir / "attempts.jsonl"; }
    std::filesystem::path agreement_json() const { return dir / "agreement.json"; }
    std::filesystem::path agreement_txt() const { return dir / "agreement.txt"; }
    std::filesystem::path report_json() const { return dir / "report.json"; }
    std::filesystem::path report_txt() const { return dir / "report.txt"; }
};

/// Builds the transport named by the config: MockTransport for "mock",
/// HttpTransport otherwise (environment variables override the URL and key).
std::unique_ptr<judging::Transport> make_transport(const Config& config);

/// Answer prompt template for a dialect: <dir>/<Dialect>.txt, falling back to
/// Standard.txt. Placeholder {{question}}.
std::string load_answer_template(const std::filesystem::path& dir, corpus::Dialect dialect);

/// A run directory bound to a config and a transport. Stages are resumable:
/// completed rows are never re-sent.
class Run {
public:
    /// Creates or reopens <workdir>/<run_id>. A reopened run keeps its
    /// directory; rows produced under another config hash are not reused.
    Run(Config config, judging::Transport& transport, std::optional<std::string> resume_id = std::nullopt);

    const Config& config() const noexcept { return config_; }
    const RunPaths& paths() const noexcept { return paths_; }
    const std::string& run_id() const noexcept { return run_id_; }
    const std::string& config_hash() const noexcept { return hash_; }
    judging::AttemptLog& attempts() noexcept { return *attempts_; }

    StageSummary index();
    StageSummary translate();
    StageSummary respond();
    StageSummary judge();
    /// Writes agreement.json / agreement.txt; returns the JSON document.
    nlohmann::json agree();
    /// Merges human overrides, aggregates primary-judge rows, writes
    /// report.json / report.txt; returns the JSON document.
    nlohmann::json report();

    /// Rebuilds the fallback queue from the verdict log, keeping existing
    /// overrides. Returns the number of items.
    std::size_t rebuild_fallback_queue();

private:
    judging::RetryPolicy retry_policy() const;
    judging::GatewayRequest request(const std::string& model, std::string prompt, judging::ResponseFormat fmt,
                                    judging::RequestTags tags) const;
    std::string call(const judging::GatewayRequest& req);
    void throttle(const std::string& model);

    Config config_;
    judging::Transport& transport_;
    std::string hash_;
    std::string run_id_;
    RunPaths paths_;
    std::unique_ptr<judging::AttemptLog> attempts_;
    struct Limiter;
    std::shared_ptr<Limiter> limiter_;
};

}  // namespace de::pipeline
