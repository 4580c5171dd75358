#include "dialect_eval/pipeline/scoring.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "dialect_eval/agreement/agreement.hpp"
#include "dialect_eval/common/error.hpp"
#include "dialect_eval/corpus/dialect.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "dialect_eval/judging/translation_judge.hpp"
#include "dialect_eval/metrics/textmetrics.hpp"

namespace de::pipeline {

using json = nlohmann::json;

namespace {

constexpr std::array<metrics::MetricKind, 5> kKinds = {metrics::MetricKind::BLEU, metrics::MetricKind::ChrF,
                                                       metrics::MetricKind::WER, metrics::MetricKind::CosineSim,
                                                       metrics::MetricKind::BertF1};

Matrix token_matrix(retrieval::Embedder& embedder, const std::string& text) {
    const auto tokens = corpus::tokenize(corpus::normalize_text(text).display);
    return Matrix::from_rows(embedder.embed(tokens));
}

}  // namespace

std::vector<ScoreItem> load_score_items(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::vector<ScoreItem> items;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            ScoreItem item;
            item.id = j.value("id", std::to_string(lineno));
            item.hypothesis = j.at("hypothesis").get<std::string>();
            item.reference = j.at("reference").get<std::string>();
            if (j.contains("human") && !j["human"].is_null()) item.human = j["human"].get<double>();
            item.source = j.value("source", "");
            item.gloss = j.value("gloss", "");
            item.dialect = j.value("dialect", "");
            items.push_back(std::move(item));
        } catch (const json::exception& e) {
            throw Error(Errc::ParseError, path.string() + ": " + e.what(), lineno);
        }
    }
    return items;
}

std::vector<json> score_items(const std::vector<ScoreItem>& items, const ScoreOptions& options) {
    std::vector<json> out;
    out.reserve(items.size());
    for (const auto& item : items) {
        json row = {{"id", item.id}};
        std::array<double, kKinds.size()> raw{};
        raw[0] = metrics::bleu(item.hypothesis, item.reference);
        raw[1] = metrics::chrf(item.hypothesis, item.reference);
        raw[2] = metrics::wer(item.hypothesis, item.reference);
        std::size_t n = 3;
        if (options.embedder != nullptr) {
            const std::vector<std::string> pair{item.hypothesis, item.reference};
            const auto vecs = options.embedder->embed(pair);
            raw[3] = metrics::cosine_similarity(vecs[0], vecs[1]);
            raw[4] = metrics::bertscore_f1(token_matrix(*options.embedder, item.hypothesis),
                                           token_matrix(*options.embedder, item.reference));
            n = 5;
        }
        json metrics_json = json::object();
        for (std::size_t k = 0; k < n; ++k) {
            const auto v = metrics::make_metric(kKinds[k], raw[k]);
            metrics_json[std::string(metrics::to_string(kKinds[k]))] = {{"raw", v.raw}, {"normalized", v.normalized}};
        }
        row["metrics"] = metrics_json;

        if (options.transport != nullptr && !item.source.empty()) {
            judging::GatewayRequest req;
            req.model_name = options.judge_model;
            req.prompt = judging::build_translation_judge_prompt(item.source, item.gloss, item.reference,
                                                                 item.hypothesis, corpus::parse_dialect(item.dialect));
            req.response_format_hint = judging::ResponseFormat::Json;
            req.max_attempts = options.max_attempts;
            req.tags = {{"stage", "translation_judge"}, {"question_id", item.id}, {"dialect", item.dialect},
                        {"judge", options.judge_model}};
            judging::AttemptLog scratch;
            try {
                const auto raw_verdict =
                    judging::call_gateway(*options.transport, req, options.attempts ? *options.attempts : scratch);
                const auto v = judging::parse_translation_verdict(raw_verdict);
                json flags = json::array();
                for (const auto& c : judging::check_rubric_ceilings(v)) {
                    flags.push_back({{"ceiling", c.ceiling}, {"rule", c.rule}});
                }
                row["translation_verdict"] = json::parse(judging::serialize_translation_verdict(v));
                row["ceiling_flags"] = flags;
            } catch (const Error& e) {
                if (e.code() == Errc::Killed) throw;
                row["translation_error"] = std::string(errc_name(e.code())) + ": " + e.what();
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

json metric_correlations(const std::vector<json>& scored, const std::vector<ScoreItem>& items) {
    if (scored.size() != items.size()) throw Error(Errc::InvalidArgument, "scored rows and items differ in length");
    std::vector<double> human;
    for (const auto& item : items) {
        if (!item.human) throw Error(Errc::InvalidSeries, "item " + item.id + " has no human score");
        human.push_back(*item.human);
    }
    std::vector<agreement::NamedColumn> columns;
    for (const auto& [name, _] : scored.front().at("metrics").items()) {
        agreement::NamedColumn col{name, {}};
        for (const auto& row : scored) col.values.push_back(row.at("metrics").at(name).at("normalized").get<double>());
        columns.push_back(std::move(col));
    }
    json out = json::array();
    for (const auto& r : agreement::correlation_study(columns, human)) {
        out.push_back({{"metric", r.metric}, {"pearson", r.pearson}, {"spearman", r.spearman}, {"ccc", r.ccc}});
    }
    return out;
}

}  // namespace de::pipeline
