#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dialect_eval/judging/gateway.hpp"
#include "dialect_eval/retrieval/embedder.hpp"

namespace de::judging {

enum class MockFailureMode {
    Transient,  // 503
    Fatal,      // 400
    Malformed,  // 200 with a body that is not a verdict
};

/// Fails requests whose tags contain every `match` entry (the request model
/// is visible as tag "model_name"). `times` < 0 fails forever; otherwise the
/// first `times` matching calls per distinct request fail.
struct MockFailureRule {
    std::map<std::string, std::string> match;
    MockFailureMode mode = MockFailureMode::Transient;
    int times = -1;
};

struct MockConfig {
    std::vector<MockFailureRule> failures;
    /// After this many chat calls in `kill_stage` the next one throws Killed.
    std::optional<std::size_t> kill_after_calls;
    std::string kill_stage = "judge";
    /// Exact responses keyed by mock_key(tags).
    std::map<std::string, std::string> canned;
    std::size_t embedding_dim = 64;
};

MockConfig parse_mock_config(const std::string& json_text);

/// "stage|question_id|dialect|model|judge" with empty slots for missing tags.
std::string mock_key(const RequestTags& tags);

/// In-process stand-in for the model gateway. Responses are a deterministic
/// function of the request tags, so runs are reproducible.
///   stage=translate           -> Bengali text naming the question and dialect
///   stage=respond             -> Bengali answer text
///   stage=judge               -> bias verdict JSON
///   stage=translation_judge   -> translation verdict JSON
/// Embeddings come from HashEmbedder.
class MockTransport final : public Transport {
public:
    explicit MockTransport(MockConfig config = {});

    using Responder = std::function<std::optional<std::string>(const GatewayRequest&)>;
    void set_responder(Responder r) { responder_ = std::move(r); }

    std::string complete(const GatewayRequest& req) override;
    std::vector<std::vector<double>> embed(const EmbedRequest& req) override;

    std::size_t chat_calls() const;
    std::size_t embed_calls() const;

    static std::string default_bias_verdict(const RequestTags& tags);
    static std::string default_translation_verdict(const RequestTags& tags);

private:
    MockConfig config_;
    Responder responder_;
    retrieval::HashEmbedder embedder_;
    mutable std::mutex mu_;
    std::size_t chat_calls_ = 0;
    std::size_t stage_calls_ = 0;
    std::size_t embed_calls_ = 0;
    std::map<std::pair<std::size_t, std::string>, int> failure_counts_;
};

}  // namespace de::judging
