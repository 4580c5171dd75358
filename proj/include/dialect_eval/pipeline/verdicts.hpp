#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dialect_eval/corpus/dialect.hpp"
#include "dialect_eval/judging/rubric.hpp"

namespace de::pipeline {

/// One judge row of the verdict log.
struct VerdictRow {
    std::string verdict_ref;
    std::string question_id;
    corpus::Dialect dialect = corpus::Dialect::Standard;
    std::string model;
    std::string judge;
    bool primary = false;
    bool failed = false;  // sentinel "evaluation failed" row
    std::string error;
    judging::BiasVerdict verdict;  // gated, with final_score
    std::optional<judging::BiasVerdict> human;
    std::string config_hash;

    double score() const noexcept { return human ? human->final_score : verdict.final_score; }
};

/// Deterministic id of a verdict row.
std::string make_verdict_ref(const std::string& question_id, corpus::Dialect dialect, const std::string& model,
                             const std::string& judge, const std::string& config_hash);

nlohmann::json to_json(const VerdictRow& row);
/// Throws CorruptLog on a row that does not carry the verdict fields.
VerdictRow verdict_from_json(const nlohmann::json& row);
std::vector<VerdictRow> load_verdicts(const std::filesystem::path& path);

enum class FallbackStatus { Pending, Resolved };
std::string_view to_string(FallbackStatus s) noexcept;

struct FallbackPayload {
    std::string standard_question;
    std::string dialect_question;
    std::string standard_response;
    std::string dialect_response;
    bool response_refusal_flag = false;
};

/// A primary-judge verdict with confidence <= 3 awaiting human review.
struct FallbackItem {
    std::string verdict_ref;
    std::string question_id;
    corpus::Dialect dialect = corpus::Dialect::Standard;
    std::string model_name;
    FallbackPayload payload;
    judging::BiasVerdict machine;
    std::optional<judging::BiasVerdict> human_override;
    std::string note;

    FallbackStatus status() const noexcept {
        return human_override ? FallbackStatus::Resolved : FallbackStatus::Pending;
    }
};

nlohmann::json to_json(const FallbackItem& item);
FallbackItem fallback_from_json(const nlohmann::json& j);
std::vector<FallbackItem> load_fallback_queue(const std::filesystem::path& path);
void save_fallback_queue(const std::filesystem::path& path, const std::vector<FallbackItem>& items);

/// Human Likert values (gated and scored with `weights`) as a verdict.
judging::BiasVerdict make_human_verdict(const judging::Likert& likert, bool script_valid, const std::string& note,
                                        const judging::RubricWeights& weights);

/// Attaches each resolved item's override to the row it references. Machine
/// verdicts stay untouched. Throws UnknownVerdictRef.
std::vector<VerdictRow> merge_human_overrides(std::vector<VerdictRow> rows, const std::vector<FallbackItem>& items);

struct BiasCell {
    double mean = 0.0;
    std::size_t count = 0;
};

struct BiasTable {
    std::map<std::pair<std::string, corpus::Dialect>, BiasCell> cells;
    std::map<std::string, double> row_avg;         // macro-average over the model's cells
    std::map<corpus::Dialect, double> col_avg;     // mean of cell means over models
    std::map<std::string, std::size_t> sentinels;  // per model
    std::size_t total_rows = 0;
    std::size_t sentinel_rows = 0;
};

/// Group-by over rows; sentinel rows count toward `sentinels` only.
/// Throws EmptyLog.
BiasTable aggregate_bias_table(const std::vector<VerdictRow>& rows);

nlohmann::json to_json(const BiasTable& table);
std::string format_bias_table(const BiasTable& table);

}  // namespace de::pipeline
