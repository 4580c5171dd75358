#include "dialect_eval/pipeline/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/hash.hpp"

namespace de::pipeline {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::InvalidConfig, msg); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) bad(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, _] : obj.items()) {
        if (!ok.count(k)) bad("unknown key " + where + "." + k);
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

void read_profile(const json& j, const std::string& where, retrieval::WeightProfile& p) {
    check_keys(j, where, {"dense_w", "sparse_w", "pool_k"});
    p.dense_w = j.value("dense_w", p.dense_w);
    p.sparse_w = j.value("sparse_w", p.sparse_w);
    p.pool_k = j.value("pool_k", p.pool_k);
}

json profile_json(const retrieval::WeightProfile& p) {
    return {{"dense_w", p.dense_w}, {"sparse_w", p.sparse_w}, {"pool_k", p.pool_k}};
}

}  // namespace

std::vector<std::string> Config::judges() const {
    std::vector<std::string> out{primary_judge};
    out.insert(out.end(), secondary_judges.begin(), secondary_judges.end());
    return out;
}

json Config::fingerprint() const {
    json dialect_names = json::array();
    for (auto d : dialects) dialect_names.push_back(std::string(corpus::to_string(d)));
    json weights_json = json::object();
    for (auto item : judging::kRubricOrder) weights_json[std::string(judging::to_string(item))] = weights[item];
    return {
        {"corpus", {{"path", corpus.generic_string()}, {"format", corpus_format == corpus::PairFormat::Tsv ? "tsv" : "jsonl"}}},
        {"questions", questions.generic_string()},
        {"dialects", dialect_names},
        {"models", models},
        {"translator", translator_model},
        {"embedding", embedding_model},
        {"retrieval",
         {{"k1", retrieval.bm25.k1},
          {"b", retrieval.bm25.b},
          {"standard", profile_json(retrieval.standard)},
          {"short", profile_json(retrieval.short_query)},
          {"bonus", {{"district", retrieval.standard.district_bonus}, {"char", retrieval.standard.char_bonus_w}}},
          {"dense_min_sim", retrieval.dense_min_sim},
          {"fewshot_k", retrieval.fewshot_k}}},
        {"judges",
         {{"primary", primary_judge},
          {"secondary", secondary_judges},
          {"max_attempts", judge_max_attempts},
          {"strict_json", strict_json},
          {"temperature", temperature}}},
        {"rubric", {{"weights", weights_json}, {"statements", statements}, {"template", bias_judge_template}}},
        {"answer_templates", answer_templates.generic_string()},
        {"agreement",
         {{"cbs_threshold", cbs.threshold},
          {"scale_max", cbs.scale_max},
          {"variance", variance == agreement::VarianceKind::Sample ? "sample" : "population"}}},
    };
}

std::string Config::hash() const { return sha256_hex(fingerprint().dump()); }

std::string Config::effective_run_id() const { return run_id.empty() ? hash().substr(0, 12) : run_id; }

void Config::validate() const {
    retrieval.validate();
    weights.validate(cbs.scale_max);
    cbs.validate();
    if (primary_judge.empty()) bad("judges.primary is required");
    std::set<std::string> seen{primary_judge};
    for (const auto& j : secondary_judges) {
        if (!seen.insert(j).second) bad("judge listed twice: " + j);
    }
    if (judge_max_attempts < 1) bad("judges.max_attempts must be at least 1");
    if (gateway.max_attempts < 1) bad("gateway.max_attempts must be at least 1");
    if (gateway.parallelism < 1) bad("gateway.parallelism must be at least 1");
    for (const auto& [model, rpm] : gateway.rate_limits) {
        if (!(rpm > 0)) bad("gateway.rate_limits." + model + " must be positive");
    }
    std::set<std::string> model_set;
    for (const auto& m : models) {
        if (m.empty() || !model_set.insert(m).second) bad("models must be unique and non-empty");
    }
    for (auto d : dialects) {
        if (d == corpus::Dialect::Standard) bad("dialects lists regional variants only");
    }
    for (const auto& s : statements) {
        if (s.empty()) bad("rubric statements must be non-empty");
    }
    if (run_id.find_first_of("/\\") != std::string::npos || run_id == "." || run_id == "..") bad("invalid run_id");
}

Config parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    Config c;
    try {
        check_keys(j, "config",
                   {"workdir", "run_id", "corpus", "questions", "dialects", "models", "translator", "embedding",
                    "retrieval", "judges", "rubric", "answer_templates", "agreement", "gateway"});
        c.workdir = resolve(base_dir, j.value("workdir", std::string("runs")));
        c.run_id = j.value("run_id", "");

        if (j.contains("corpus")) {
            const auto& cj = j["corpus"];
            check_keys(cj, "corpus", {"path", "format"});
            c.corpus = resolve(base_dir, cj.value("path", ""));
            const std::string fmt = cj.value("format", "jsonl");
            if (fmt == "tsv") {
                c.corpus_format = corpus::PairFormat::Tsv;
            } else if (fmt != "jsonl") {
                bad("corpus.format must be jsonl or tsv");
            }
        }
        c.questions = resolve(base_dir, j.value("questions", ""));
        for (const auto& d : j.value("dialects", std::vector<std::string>{})) {
            auto parsed = corpus::try_parse_dialect(d);
            if (!parsed) bad("unknown dialect " + d);
            c.dialects.push_back(*parsed);
        }
        if (!j.contains("dialects")) c.dialects.assign(corpus::kRegionalDialects.begin(), corpus::kRegionalDialects.end());
        c.models = j.value("models", c.models);

        if (j.contains("translator")) {
            check_keys(j["translator"], "translator", {"model"});
            c.translator_model = j["translator"].value("model", c.translator_model);
        }
        if (j.contains("embedding")) {
            const auto& ej = j["embedding"];
            check_keys(ej, "embedding", {"model", "cache_dir", "batch_size"});
            c.embedding_model = ej.value("model", c.embedding_model);
            c.embedding_cache = resolve(base_dir, ej.value("cache_dir", ""));
            c.embedding_batch = ej.value("batch_size", c.embedding_batch);
        }
        if (j.contains("retrieval")) {
            const auto& rj = j["retrieval"];
            check_keys(rj, "retrieval", {"k1", "b", "profiles", "bonus", "dense_min_sim", "fewshot_k"});
            c.retrieval.bm25.k1 = rj.value("k1", c.retrieval.bm25.k1);
            c.retrieval.bm25.b = rj.value("b", c.retrieval.bm25.b);
            if (rj.contains("profiles")) {
                const auto& pj = rj["profiles"];
                check_keys(pj, "retrieval.profiles", {"standard", "short"});
                if (pj.contains("standard")) read_profile(pj["standard"], "retrieval.profiles.standard", c.retrieval.standard);
                if (pj.contains("short")) read_profile(pj["short"], "retrieval.profiles.short", c.retrieval.short_query);
            }
            if (rj.contains("bonus")) {
                const auto& bj = rj["bonus"];
                check_keys(bj, "retrieval.bonus", {"district", "char"});
                for (auto* p : {&c.retrieval.standard, &c.retrieval.short_query}) {
                    p->district_bonus = bj.value("district", p->district_bonus);
                    p->char_bonus_w = bj.value("char", p->char_bonus_w);
                }
            }
            c.retrieval.dense_min_sim = rj.value("dense_min_sim", c.retrieval.dense_min_sim);
            c.retrieval.fewshot_k = rj.value("fewshot_k", c.retrieval.fewshot_k);
        }
        if (j.contains("judges")) {
            const auto& jj = j["judges"];
            check_keys(jj, "judges", {"primary", "secondary", "max_attempts", "strict_json", "temperature"});
            c.primary_judge = jj.value("primary", "");
            c.secondary_judges = jj.value("secondary", c.secondary_judges);
            c.judge_max_attempts = jj.value("max_attempts", c.judge_max_attempts);
            c.strict_json = jj.value("strict_json", c.strict_json);
            c.temperature = jj.value("temperature", c.temperature);
        }
        if (j.contains("rubric")) {
            const auto& rj = j["rubric"];
            check_keys(rj, "rubric", {"weights", "statements", "template"});
            if (rj.contains("weights")) {
                const auto& wj = rj["weights"];
                check_keys(wj, "rubric.weights", {"comprehension", "factual", "completeness", "clarity", "length"});
                for (auto item : judging::kRubricOrder) {
                    auto& w = c.weights.values[static_cast<std::size_t>(item)];
                    w = wj.value(std::string(judging::to_string(item)), w);
                }
            }
            if (rj.contains("statements")) {
                auto st = rj["statements"].get<std::vector<std::string>>();
                if (st.size() != judging::kRubricItems) bad("rubric.statements needs exactly five entries");
                std::copy(st.begin(), st.end(), c.statements.begin());
            }
            if (rj.contains("template")) {
                const auto path = resolve(base_dir, rj["template"].get<std::string>());
                std::ifstream in(path, std::ios::binary);
                if (!in) bad("cannot read rubric.template " + path.string());
                std::ostringstream ss;
                ss << in.rdbuf();
                c.bias_judge_template = ss.str();
            }
        }
        if (j.contains("answer_templates")) c.answer_templates = resolve(base_dir, j["answer_templates"].get<std::string>());
        else c.answer_templates = resolve(base_dir, c.answer_templates.string());
        if (j.contains("agreement")) {
            const auto& aj = j["agreement"];
            check_keys(aj, "agreement", {"cbs_threshold", "scale_max", "variance"});
            c.cbs.threshold = aj.value("cbs_threshold", c.cbs.threshold);
            c.cbs.scale_max = aj.value("scale_max", c.cbs.scale_max);
            const std::string v = aj.value("variance", "population");
            if (v == "sample") {
                c.variance = agreement::VarianceKind::Sample;
            } else if (v != "population") {
                bad("agreement.variance must be population or sample");
            }
        }
        if (j.contains("gateway")) {
            const auto& gj = j["gateway"];
            check_keys(gj, "gateway",
                       {"kind", "base_url", "mock_config", "max_attempts", "timeout_ms", "base_delay_ms", "parallelism",
                        "rate_limits"});
            auto& g = c.gateway;
            g.kind = gj.value("kind", g.kind);
            if (g.kind != "mock" && g.kind != "http") bad("gateway.kind must be mock or http");
            g.base_url = gj.value("base_url", g.base_url);
            g.mock_config = resolve(base_dir, gj.value("mock_config", ""));
            g.max_attempts = gj.value("max_attempts", g.max_attempts);
            g.timeout = std::chrono::milliseconds(gj.value("timeout_ms", static_cast<long long>(g.timeout.count())));
            g.base_delay = std::chrono::milliseconds(gj.value("base_delay_ms", static_cast<long long>(g.base_delay.count())));
            g.parallelism = gj.value("parallelism", g.parallelism);
            g.rate_limits = gj.value("rate_limits", g.rate_limits);
        }
    } catch (const json::exception& e) {
        bad(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidConfig, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

}  // namespace de::pipeline
