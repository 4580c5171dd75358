#include "dialect_eval/pipeline/verdicts.hpp"

#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/hash.hpp"
#include "dialect_eval/pipeline/runlog.hpp"

namespace de::pipeline {

using json = nlohmann::json;

namespace {

json verdict_json(const judging::BiasVerdict& v) {
    return {{"reasoning", v.reasoning},   {"likert", v.likert},         {"script_valid", v.script_valid},
            {"refusal", v.refusal},       {"confidence", v.confidence}, {"final_score", v.final_score}};
}

judging::BiasVerdict verdict_of(const json& j) {
    judging::BiasVerdict v;
    v.reasoning = j.at("reasoning").get<std::string>();
    v.likert = j.at("likert").get<judging::Likert>();
    v.script_valid = j.at("script_valid").get<bool>();
    v.refusal = j.value("refusal", false);
    v.confidence = j.at("confidence").get<int>();
    v.final_score = j.at("final_score").get<double>();
    return v;
}

}  // namespace

std::string make_verdict_ref(const std::string& question_id, corpus::Dialect dialect, const std::string& model,
                             const std::string& judge, const std::string& config_hash) {
    const std::string key = question_id + '\x1f' + std::string(corpus::to_string(dialect)) + '\x1f' + model + '\x1f' +
                            judge + '\x1f' + config_hash;
    return "v-" + sha256_hex(key).substr(0, 16);
}

json to_json(const VerdictRow& row) {
    json j = {{"verdict_ref", row.verdict_ref},
              {"question_id", row.question_id},
              {"dialect", corpus::to_string(row.dialect)},
              {"model", row.model},
              {"judge", row.judge},
              {"primary", row.primary},
              {"status", row.failed ? "failed" : "ok"},
              {"config_hash", row.config_hash}};
    if (row.failed) {
        j["error"] = row.error;
    } else {
        j["verdict"] = verdict_json(row.verdict);
    }
    if (row.human) {
        j["human"] = verdict_json(*row.human);
        j["source"] = "human";
    }
    return j;
}

VerdictRow verdict_from_json(const json& j) {
    try {
        VerdictRow row;
        row.verdict_ref = j.at("verdict_ref").get<std::string>();
        row.question_id = j.at("question_id").get<std::string>();
        row.dialect = corpus::parse_dialect(j.at("dialect").get<std::string>());
        row.model = j.at("model").get<std::string>();
        row.judge = j.at("judge").get<std::string>();
        row.primary = j.at("primary").get<bool>();
        row.failed = j.at("status").get<std::string>() != "ok";
        row.config_hash = j.at("config_hash").get<std::string>();
        if (row.failed) {
            row.error = j.value("error", "");
        } else {
            row.verdict = verdict_of(j.at("verdict"));
        }
        if (j.contains("human")) row.human = verdict_of(j["human"]);
        return row;
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptLog, std::string("bad verdict row: ") + e.what());
    }
}

std::vector<VerdictRow> load_verdicts(const std::filesystem::path& path) {
    std::vector<VerdictRow> rows;
    for (const auto& j : RunLog::read(path)) rows.push_back(verdict_from_json(j));
    return rows;
}

std::string_view to_string(FallbackStatus s) noexcept { return s == FallbackStatus::Pending ? "pending" : "resolved"; }

json to_json(const FallbackItem& item) {
    json j = {{"verdict_ref", item.verdict_ref},
              {"question_id", item.question_id},
              {"dialect", corpus::to_string(item.dialect)},
              {"model_name", item.model_name},
              {"payload",
               {{"standard_question", item.payload.standard_question},
                {"dialect_question", item.payload.dialect_question},
                {"standard_response", item.payload.standard_response},
                {"dialect_response", item.payload.dialect_response},
                {"response_refusal_flag", item.payload.response_refusal_flag},
                {"machine_verdict", verdict_json(item.machine)}}},
              {"human_override", item.human_override ? verdict_json(*item.human_override) : json(nullptr)},
              {"note", item.note},
              {"status", to_string(item.status())}};
    return j;
}

FallbackItem fallback_from_json(const json& j) {
    try {
        FallbackItem item;
        item.verdict_ref = j.at("verdict_ref").get<std::string>();
        item.question_id = j.at("question_id").get<std::string>();
        item.dialect = corpus::parse_dialect(j.at("dialect").get<std::string>());
        item.model_name = j.at("model_name").get<std::string>();
        const auto& p = j.at("payload");
        item.payload.standard_question = p.at("standard_question").get<std::string>();
        item.payload.dialect_question = p.at("dialect_question").get<std::string>();
        item.payload.standard_response = p.at("standard_response").get<std::string>();
        item.payload.dialect_response = p.at("dialect_response").get<std::string>();
        item.payload.response_refusal_flag = p.value("response_refusal_flag", false);
        item.machine = verdict_of(p.at("machine_verdict"));
        if (j.contains("human_override") && !j["human_override"].is_null()) {
            item.human_override = verdict_of(j["human_override"]);
        }
        item.note = j.value("note", "");
        return item;
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptLog, std::string("bad fallback item: ") + e.what());
    }
}

std::vector<FallbackItem> load_fallback_queue(const std::filesystem::path& path) {
    std::vector<FallbackItem> items;
    if (!std::filesystem::exists(path)) return items;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            items.push_back(fallback_from_json(json::parse(line)));
        } catch (const json::exception&) {
            throw Error(Errc::CorruptLog, path.string() + ": unparseable queue item", lineno);
        }
    }
    return items;
}

void save_fallback_queue(const std::filesystem::path& path, const std::vector<FallbackItem>& items) {
    std::string out;
    for (const auto& item : items) {
        out += to_json(item).dump();
        out += '\n';
    }
    write_atomic(path, out);
}

judging::BiasVerdict make_human_verdict(const judging::Likert& likert, bool script_valid, const std::string& note,
                                        const judging::RubricWeights& weights) {
    judging::BiasVerdict v;
    v.reasoning = note.empty() ? "human review" : note;
    v.likert = likert;
    v.script_valid = script_valid;
    v.confidence = 5;
    return judging::apply_script_gate(v, weights);
}

std::vector<VerdictRow> merge_human_overrides(std::vector<VerdictRow> rows, const std::vector<FallbackItem>& items) {
    std::unordered_map<std::string, std::size_t> by_ref;
    for (std::size_t i = 0; i < rows.size(); ++i) by_ref.emplace(rows[i].verdict_ref, i);
    for (const auto& item : items) {
        auto it = by_ref.find(item.verdict_ref);
        if (it == by_ref.end()) throw Error(Errc::UnknownVerdictRef, "no verdict " + item.verdict_ref);
        if (item.human_override) rows[it->second].human = item.human_override;
    }
    return rows;
}

BiasTable aggregate_bias_table(const std::vector<VerdictRow>& rows) {
    if (rows.empty()) throw Error(Errc::EmptyLog, "no verdict rows to aggregate");
    BiasTable t;
    t.total_rows = rows.size();
    std::map<std::pair<std::string, corpus::Dialect>, double> sums;
    for (const auto& r : rows) {
        if (r.failed) {
            ++t.sentinel_rows;
            ++t.sentinels[r.model];
            continue;
        }
        const auto key = std::make_pair(r.model, r.dialect);
        sums[key] += r.score();
        ++t.cells[key].count;
    }
    std::map<std::string, std::pair<double, std::size_t>> by_model;
    std::map<corpus::Dialect, std::pair<double, std::size_t>> by_dialect;
    for (auto& [key, cell] : t.cells) {
        cell.mean = sums[key] / static_cast<double>(cell.count);
        auto& m = by_model[key.first];
        m.first += cell.mean;
        ++m.second;
        auto& d = by_dialect[key.second];
        d.first += cell.mean;
        ++d.second;
    }
    for (const auto& [model, acc] : by_model) t.row_avg[model] = acc.first / static_cast<double>(acc.second);
    for (const auto& [dialect, acc] : by_dialect) t.col_avg[dialect] = acc.first / static_cast<double>(acc.second);
    return t;
}

json to_json(const BiasTable& t) {
    json cells = json::array();
    for (const auto& [key, cell] : t.cells) {
        cells.push_back({{"model", key.first},
                         {"dialect", corpus::to_string(key.second)},
                         {"mean", cell.mean},
                         {"count", cell.count}});
    }
    json col = json::object();
    for (const auto& [d, v] : t.col_avg) col[std::string(corpus::to_string(d))] = v;
    return {{"cells", cells},
            {"row_avg", t.row_avg},
            {"col_avg", col},
            {"sentinels", t.sentinels},
            {"total_rows", t.total_rows},
            {"sentinel_rows", t.sentinel_rows}};
}

std::string format_bias_table(const BiasTable& t) {
    std::vector<corpus::Dialect> dialects;
    for (const auto& [d, _] : t.col_avg) dialects.push_back(d);
    std::size_t name_w = 5;
    for (const auto& [m, _] : t.row_avg) name_w = std::max(name_w, m.size());
    std::string out = fmt::format("{:<{}}", "Model", name_w);
    for (auto d : dialects) out += fmt::format(" {:>11}", corpus::to_string(d));
    out += fmt::format(" {:>8}\n", "Avg");
    for (const auto& [model, avg] : t.row_avg) {
        out += fmt::format("{:<{}}", model, name_w);
        for (auto d : dialects) {
            auto it = t.cells.find({model, d});
            out += it == t.cells.end() ? fmt::format(" {:>11}", "-") : fmt::format(" {:>11.2f}", it->second.mean);
        }
        out += fmt::format(" {:>8.2f}\n", avg);
    }
    out += fmt::format("{:<{}}", "Avg", name_w);
    for (auto d : dialects) out += fmt::format(" {:>11.2f}", t.col_avg.at(d));
    out += "\n";
    out += fmt::format("rows: {}  sentinel rows: {}\n", t.total_rows, t.sentinel_rows);
    return out;
}

}  // namespace de::pipeline
