#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dialect_eval/agreement/agreement.hpp"
#include "dialect_eval/corpus/dialect.hpp"
#include "dialect_eval/corpus/io.hpp"
#include "dialect_eval/judging/bias_judge.hpp"
#include "dialect_eval/retrieval/hybrid.hpp"

namespace de::pipeline {

struct GatewaySettings {
    std::string kind = "mock";  // "mock" | "http"
    std::string base_url;       // DE_GATEWAY_URL wins when set
    std::filesystem::path mock_config;
    int max_attempts = 3;
    std::chrono::milliseconds timeout{60'000};
    std::chrono::milliseconds base_delay{500};
    std::size_t parallelism = 8;
    /// Requests per minute per model name; absent means unlimited.
    std::map<std::string, double> rate_limits;
};

struct Config {
    std::filesystem::path workdir = "runs";
    std::string run_id;  // empty: derived from the config hash

    std::filesystem::path corpus;
    corpus::PairFormat corpus_format = corpus::PairFormat::Jsonl;
    std::filesystem::path questions;
    std::vector<corpus::Dialect> dialects;
    std::vector<std::string> models;

    std::string translator_model = "translator";
    std::string embedding_model = "embedder";
    std::filesystem::path embedding_cache;  // empty: <run>/embed_cache
    std::size_t embedding_batch = 64;

    retrieval::RetrievalConfig retrieval;

    std::string primary_judge;
    std::vector<std::string> secondary_judges;
    int judge_max_attempts = 2;  // re-queries on unparseable verdicts
    bool strict_json = false;
    double temperature = 0.0;

    judging::RubricWeights weights;
    judging::RubricStatements statements = judging::default_rubric_statements();
    std::string bias_judge_template = judging::default_bias_judge_template();
    std::filesystem::path answer_templates = "data/templates/answer";

    agreement::CbsParams cbs;
    agreement::VarianceKind variance = agreement::VarianceKind::Population;

    GatewaySettings gateway;

    /// Primary first, then secondaries.
    std::vector<std::string> judges() const;

    /// Canonical form of every setting that affects results.
    nlohmann::json fingerprint() const;
    /// sha256 of fingerprint(); excludes workdir, run_id and gateway settings.
    std::string hash() const;
    /// run_id when set, else the first 12 hex digits of hash().
    std::string effective_run_id() const;
    /// Throws InvalidConfig.
    void validate() const;
};

/// Relative paths resolve against `base_dir`. Throws InvalidConfig.
Config parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

}  // namespace de::pipeline
