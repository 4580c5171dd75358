#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dialect_eval/judging/gateway.hpp"
#include "dialect_eval/retrieval/embedder.hpp"

namespace de::pipeline {

/// One line of a scoring input file.
struct ScoreItem {
    std::string id;
    std::string hypothesis;
    std::string reference;
    std::optional<double> human;  // on [0,1]
    // Only needed for the translation judge.
    std::string source;
    std::string gloss;
    std::string dialect;
};

struct ScoreOptions {
    retrieval::Embedder* embedder = nullptr;  // required for cosine / BERTScore
    judging::Transport* transport = nullptr;  // enables the translation judge
    judging::AttemptLog* attempts = nullptr;
    std::string judge_model;
    int max_attempts = 3;
};

/// Reads JSONL {"id","hypothesis","reference"[,"human","source","gloss","dialect"]}.
std::vector<ScoreItem> load_score_items(const std::filesystem::path& path);

/// Per-item metric rows: raw and normalized BLEU, chrF, WER, cosine and
/// BERTScore, plus the translation verdict and its ceiling flags when a
/// judge is configured.
std::vector<nlohmann::json> score_items(const std::vector<ScoreItem>& items, const ScoreOptions& options);

/// Pearson, Spearman and CCC of each normalized metric against the human
/// column. Requires every item to carry a human score.
nlohmann::json metric_correlations(const std::vector<nlohmann::json>& scored, const std::vector<ScoreItem>& items);

}  // namespace de::pipeline
