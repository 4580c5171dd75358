#include "dialect_eval/judging/mock_gateway.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/hash.hpp"
#include "dialect_eval/corpus/dialect.hpp"
#include "dialect_eval/judging/bias_judge.hpp"
#include "dialect_eval/judging/translation_judge.hpp"

namespace de::judging {

using json = nlohmann::json;

namespace {

std::string tag(const RequestTags& tags, const char* name) {
    auto it = tags.find(name);
    return it == tags.end() ? std::string{} : it->second;
}

MockFailureMode parse_mode(const std::string& s) {
    if (s == "transient") return MockFailureMode::Transient;
    if (s == "fatal") return MockFailureMode::Fatal;
    if (s == "malformed") return MockFailureMode::Malformed;
    throw Error(Errc::InvalidConfig, "unknown mock failure mode: " + s);
}

// Small deterministic draws from the tag set.
std::uint64_t draw(const RequestTags& tags, std::string_view salt) {
    return fnv1a64(std::string(salt) + "|" + mock_key(tags));
}

bool is_standard(const RequestTags& tags) {
    const std::string d = tag(tags, "dialect");
    return d.empty() || d == "Standard";
}

}  // namespace

MockConfig parse_mock_config(const std::string& json_text) {
    MockConfig cfg;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("mock config: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::InvalidConfig, "mock config must be an object");
    try {
        for (const auto& f : j.value("failures", json::array())) {
            MockFailureRule rule;
            rule.match = f.value("match", std::map<std::string, std::string>{});
            rule.mode = parse_mode(f.value("mode", "transient"));
            rule.times = f.value("times", -1);
            cfg.failures.push_back(std::move(rule));
        }
        if (j.contains("kill_after_calls") && !j["kill_after_calls"].is_null()) {
            cfg.kill_after_calls = j["kill_after_calls"].get<std::size_t>();
        }
        cfg.kill_stage = j.value("kill_stage", cfg.kill_stage);
        cfg.canned = j.value("canned", cfg.canned);
        cfg.embedding_dim = j.value("embedding_dim", cfg.embedding_dim);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("mock config: ") + e.what());
    }
    if (cfg.embedding_dim == 0) throw Error(Errc::InvalidConfig, "mock embedding_dim must be positive");
    return cfg;
}

std::string mock_key(const RequestTags& tags) {
    return tag(tags, "stage") + "|" + tag(tags, "question_id") + "|" + tag(tags, "dialect") + "|" +
           tag(tags, "model") + "|" + tag(tags, "judge");
}

MockTransport::MockTransport(MockConfig config) : config_(std::move(config)), embedder_(config_.embedding_dim) {}

std::size_t MockTransport::chat_calls() const {
    std::lock_guard lock(mu_);
    return chat_calls_;
}

std::size_t MockTransport::embed_calls() const {
    std::lock_guard lock(mu_);
    return embed_calls_;
}

std::string MockTransport::default_bias_verdict(const RequestTags& tags) {
    RequestTags item = tags;
    item.erase("judge");
    const std::uint64_t h = draw(item, "bias");
    const std::uint64_t jh = draw(tags, "bias-judge");
    const bool standard = is_standard(tags);
    BiasVerdict v;
    // Regional variants lose a point or two on average; judges mostly agree.
    const int base = standard ? 5 : 4 - static_cast<int>(h % 3);
    for (std::size_t i = 0; i < v.likert.size(); ++i) {
        const int jitter = static_cast<int>((h >> (8 * i)) % 3) - 1;
        const int judge_noise = (jh >> (4 * i)) % 5 == 0 ? -1 : 0;
        v.likert[i] = std::clamp(base + jitter + judge_noise, 0, kLikertMax);
    }
    v.script_valid = standard || (h >> 40) % 8 != 0;
    v.confidence = 1 + static_cast<int>((jh >> 44) % 5);
    v.reasoning = "Compared both responses on accuracy, depth, tone and helpfulness for " + tag(tags, "dialect") + ".";
    return serialize_bias_verdict(v);
}

std::string MockTransport::default_translation_verdict(const RequestTags& tags) {
    const std::uint64_t h = draw(tags, "translation");
    TranslationVerdict v;
    const int n = static_cast<int>(h % 3);
    for (int i = 0; i < n; ++i) v.inaccuracies.push_back({"শব্দ" + std::to_string(i + 1), "standard form used"});
    v.meaning_preserved = n == 2 ? MeaningPreserved::Partial : MeaningPreserved::Yes;
    v.score = n == 0 ? 8 + static_cast<int>((h >> 8) % 3) : (n == 1 ? 7 : 6);
    v.reasoning = "Checked each word against the reference.";
    v.rationale = n == 0 ? "Faithful translation." : "Minor lexical slips.";
    return serialize_translation_verdict(v);
}

std::string MockTransport::complete(const GatewayRequest& req) {
    RequestTags visible = req.tags;
    visible["model_name"] = req.model_name;
    const std::string stage = tag(visible, "stage");
    {
        std::lock_guard lock(mu_);
        if (config_.kill_after_calls && stage == config_.kill_stage) {
            if (stage_calls_ >= *config_.kill_after_calls) throw Error(Errc::Killed, "mock kill switch");
            ++stage_calls_;
        }
        ++chat_calls_;
        const std::string hash = req.request_hash();
        for (std::size_t r = 0; r < config_.failures.size(); ++r) {
            const auto& rule = config_.failures[r];
            bool matched = true;
            for (const auto& [k, v] : rule.match) {
                if (tag(visible, k.c_str()) != v) {
                    matched = false;
                    break;
                }
            }
            if (!matched) continue;
            int& count = failure_counts_[{r, hash}];
            if (rule.times >= 0 && count >= rule.times) continue;
            ++count;
            switch (rule.mode) {
                case MockFailureMode::Transient:
                    throw GatewayFailure(Errc::GatewayError, "HTTP 503: mock unavailable", 503, true);
                case MockFailureMode::Fatal:
                    throw GatewayFailure(Errc::GatewayError, "HTTP 400: mock rejected request", 400, false);
                case MockFailureMode::Malformed:
                    return "Sorry, the verdict could not be formatted.";
            }
        }
    }
    if (responder_) {
        if (auto r = responder_(req)) return *r;
    }
    if (auto it = config_.canned.find(mock_key(req.tags)); it != config_.canned.end()) return it->second;

    const std::string qid = tag(visible, "question_id");
    const std::string dialect = tag(visible, "dialect");
    if (stage == "translate") return "প্রশ্ন " + qid + " (" + dialect + "): এইডা কিভাবে কাম করে?";
    if (stage == "respond") {
        return "উত্তর " + qid + ": এটি একটি সংক্ষিপ্ত ব্যাখ্যা। মডেল " + tag(visible, "model") + " উপভাষা " +
               (dialect.empty() ? "Standard" : dialect) + " এর জন্য উত্তর দিয়েছে।";
    }
    if (stage == "judge") return default_bias_verdict(req.tags);
    if (stage == "translation_judge") return default_translation_verdict(req.tags);
    return "ঠিক আছে।";
}

std::vector<std::vector<double>> MockTransport::embed(const EmbedRequest& req) {
    {
        std::lock_guard lock(mu_);
        ++embed_calls_;
    }
    return embedder_.embed(req.texts);
}

}  // namespace de::judging
