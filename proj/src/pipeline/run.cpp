#include "dialect_eval/pipeline/run.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/hash.hpp"
#include "dialect_eval/common/template.hpp"
#include "dialect_eval/common/utf8.hpp"
#include "dialect_eval/corpus/io.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "dialect_eval/judging/mock_gateway.hpp"
#include "dialect_eval/pipeline/executor.hpp"
#include "dialect_eval/pipeline/runlog.hpp"
#include "dialect_eval/retrieval/prompt.hpp"

namespace de::pipeline {

using json = nlohmann::json;
using corpus::Dialect;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string join_key(std::initializer_list<std::string_view> parts) {
    std::string out;
    for (auto p : parts) {
        if (!out.empty()) out += '|';
        out += p;
    }
    return out;
}

std::string dname(Dialect d) { return std::string(corpus::to_string(d)); }

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

RunLog::KeyFn key_of(std::vector<std::string> fields) {
    return [fields = std::move(fields)](const json& row) {
        std::string out;
        for (const auto& f : fields) {
            if (!out.empty()) out += '|';
            out += row.at(f).get<std::string>();
        }
        return out;
    };
}

RunLog translation_log(const RunPaths& p) {
    return RunLog(p.translations(), key_of({"question_id", "dialect", "config_hash"}));
}
RunLog standard_log(const RunPaths& p) {
    return RunLog(p.standard_responses(), key_of({"question_id", "model", "config_hash"}));
}
RunLog response_log(const RunPaths& p) {
    return RunLog(p.responses(), key_of({"question_id", "dialect", "model", "config_hash"}));
}
RunLog verdict_log(const RunPaths& p) {
    return RunLog(p.verdicts(), key_of({"question_id", "dialect", "model", "judge", "config_hash"}));
}

std::vector<json> rows_for(const std::filesystem::path& path, const std::string& hash) {
    std::vector<json> out;
    if (!std::filesystem::exists(path)) return out;
    for (auto& row : RunLog::read(path)) {
        if (row.value("config_hash", "") == hash) out.push_back(std::move(row));
    }
    return out;
}

bool is_sentinel_error(const Error& e) {
    return dynamic_cast<const GatewayFailure*>(&e) != nullptr || e.code() == Errc::NoCandidates;
}

void log_summary(const StageSummary& s) {
    spdlog::info("{}: {} items, {} already done, {} written, {} failed", s.stage, s.total, s.skipped, s.written,
                 s.failed);
}

}  // namespace

std::unique_ptr<judging::Transport> make_transport(const Config& config) {
    const auto& g = config.gateway;
    if (g.kind == "mock") {
        judging::MockConfig mock;
        if (!g.mock_config.empty()) mock = judging::parse_mock_config(slurp(g.mock_config));
        return std::make_unique<judging::MockTransport>(std::move(mock));
    }
    std::string url = g.base_url;
    if (const char* env = std::getenv("DE_GATEWAY_URL"); env != nullptr && *env != '\0') url = env;
    if (url.empty()) throw Error(Errc::InvalidConfig, "no gateway URL: set DE_GATEWAY_URL or gateway.base_url");
    const char* key = std::getenv("DE_GATEWAY_KEY");
    return std::make_unique<judging::HttpTransport>(url, key == nullptr ? "" : key);
}

std::string load_answer_template(const std::filesystem::path& dir, Dialect dialect) {
    const auto path = dir / (dname(dialect) + ".txt");
    if (std::filesystem::exists(path)) return slurp(path);
    const auto fallback = dir / "Standard.txt";
    if (std::filesystem::exists(fallback)) {
        spdlog::warn("no answer template for {}; using {}", dname(dialect), fallback.string());
        return slurp(fallback);
    }
    throw Error(Errc::InvalidConfig, "no answer template in " + dir.string());
}

struct Run::Limiter {
    std::mutex mu;
    std::map<std::string, std::chrono::steady_clock::time_point> next;
};

Run::Run(Config config, judging::Transport& transport, std::optional<std::string> resume_id)
    : config_(std::move(config)), transport_(transport), limiter_(std::make_shared<Limiter>()) {
    config_.validate();
    hash_ = config_.hash();
    run_id_ = resume_id ? *resume_id : config_.effective_run_id();
    paths_.dir = config_.workdir / run_id_;
    if (resume_id && !std::filesystem::is_directory(paths_.dir)) {
        throw Error(Errc::InvalidArgument, "no run to resume at " + paths_.dir.string());
    }
    std::filesystem::create_directories(paths_.dir);
    json snapshot = {{"config_hash", hash_}, {"config", config_.fingerprint()}};
    if (std::filesystem::exists(paths_.config())) {
        const json existing = json::parse(slurp(paths_.config()));
        if (existing.value("config_hash", "") != hash_) {
            spdlog::warn("run {} was started with config {}; rows from it will not be reused", run_id_,
                         existing.value("config_hash", "?").substr(0, 12));
            write_atomic(paths_.dir / ("config-" + hash_.substr(0, 12) + ".json"), snapshot.dump(2) + "\n");
        }
    } else {
        write_atomic(paths_.config(), snapshot.dump(2) + "\n");
    }
    attempts_ = std::make_unique<judging::AttemptLog>(paths_.attempts());
}

judging::RetryPolicy Run::retry_policy() const {
    judging::RetryPolicy p;
    p.base_delay = config_.gateway.base_delay;
    return p;
}

judging::GatewayRequest Run::request(const std::string& model, std::string prompt, judging::ResponseFormat fmt,
                                     judging::RequestTags tags) const {
    judging::GatewayRequest req;
    req.model_name = model;
    req.prompt = std::move(prompt);
    req.response_format_hint = fmt;
    req.max_attempts = config_.gateway.max_attempts;
    req.timeout = config_.gateway.timeout;
    req.temperature = config_.temperature;
    req.tags = std::move(tags);
    return req;
}

void Run::throttle(const std::string& model) {
    auto it = config_.gateway.rate_limits.find(model);
    if (it == config_.gateway.rate_limits.end()) return;
    const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(60.0 / it->second));
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(limiter_->mu);
        const auto now = std::chrono::steady_clock::now();
        auto& next = limiter_->next[model];
        slot = std::max(now, next);
        next = slot + interval;
    }
    std::this_thread::sleep_until(slot);
}

std::string Run::call(const judging::GatewayRequest& req) {
    throttle(req.model_name);
    return judging::call_gateway(transport_, req, *attempts_, retry_policy());
}

StageSummary Run::index() {
    StageSummary s{"index"};
    const auto pairs = corpus::load_pairs(config_.corpus, config_.corpus_format);
    s.total = pairs.size();

    judging::GatewayEmbedder remote(transport_, *attempts_, config_.embedding_model, retry_policy(),
                                    config_.embedding_batch, config_.gateway.max_attempts);
    const auto cache_dir = config_.embedding_cache.empty() ? paths_.dir / "embed_cache" : config_.embedding_cache;
    retrieval::CachingEmbedder embedder(remote, cache_dir);

    std::vector<std::string> texts;
    texts.reserve(pairs.size());
    for (const auto& p : pairs) texts.push_back(p.standard);
    auto vectors = embedder.embed(texts);
    std::unordered_map<std::string, std::vector<double>> by_id;
    for (std::size_t i = 0; i < pairs.size(); ++i) by_id.emplace(pairs[i].id, std::move(vectors[i]));
    auto [dense, sparse] = retrieval::build_indexes(pairs, by_id, config_.retrieval.bm25);

    std::filesystem::create_directories(paths_.index_dir());
    std::ostringstream dense_out, sparse_out;
    dense.save(dense_out);
    sparse.save(sparse_out);
    write_atomic(paths_.index_dir() / "dense.json", dense_out.str());
    write_atomic(paths_.index_dir() / "sparse.json", sparse_out.str());

    json manifest = {{"corpus", config_.corpus.generic_string()},
                     {"corpus_sha256", sha256_hex(slurp(config_.corpus))},
                     {"embedding_model", config_.embedding_model},
                     {"dim", dense.dim()},
                     {"count", pairs.size()},
                     {"entries", dense.ids()},
                     {"bm25", {{"k1", config_.retrieval.bm25.k1}, {"b", config_.retrieval.bm25.b}}}};
    write_atomic(paths_.manifest(), manifest.dump(2) + "\n");
    s.written = pairs.size();
    spdlog::info("index: {} pairs, dim {}, cache hits {}, misses {}, corrupt {}", pairs.size(), dense.dim(),
                 embedder.hits(), embedder.misses(), embedder.corrupt());
    return s;
}

StageSummary Run::translate() {
    StageSummary s{"translate"};
    if (!std::filesystem::exists(paths_.manifest())) {
        throw Error(Errc::InvalidArgument, "indexes not built; run the index stage first");
    }
    const json manifest = json::parse(slurp(paths_.manifest()));
    if (manifest.value("corpus_sha256", "") != sha256_hex(slurp(config_.corpus))) {
        throw Error(Errc::InvalidArgument, "corpus changed since indexing; rerun the index stage");
    }
    auto pairs = corpus::load_pairs(config_.corpus, config_.corpus_format);
    std::ifstream dense_in(paths_.index_dir() / "dense.json", std::ios::binary);
    std::ifstream sparse_in(paths_.index_dir() / "sparse.json", std::ios::binary);
    retrieval::HybridRetriever retriever(std::move(pairs), retrieval::DenseIndex::load(dense_in),
                                         retrieval::SparseIndex::load(sparse_in), config_.retrieval);

    const auto questions = corpus::load_questions(config_.questions);
    RunLog log = translation_log(paths_);

    struct Item {
        std::size_t q;
        Dialect d;
    };
    std::vector<Item> pending;
    for (std::size_t q = 0; q < questions.size(); ++q) {
        for (auto d : config_.dialects) {
            ++s.total;
            if (log.completed(join_key({questions[q].id, dname(d), hash_}))) {
                ++s.skipped;
            } else {
                pending.push_back({q, d});
            }
        }
    }
    if (pending.empty()) {
        log_summary(s);
        return s;
    }

    judging::GatewayEmbedder remote(transport_, *attempts_, config_.embedding_model, retry_policy(),
                                    config_.embedding_batch, config_.gateway.max_attempts);
    const auto cache_dir = config_.embedding_cache.empty() ? paths_.dir / "embed_cache" : config_.embedding_cache;
    retrieval::CachingEmbedder embedder(remote, cache_dir);
    std::vector<corpus::TaggedQuery> tagged;
    std::vector<std::string> texts;
    for (const auto& q : questions) {
        tagged.push_back(corpus::tag_query(q.standard_q));
        texts.push_back(tagged.back().original);
    }
    const auto query_vecs = embedder.embed(texts);

    run_ordered<json>(
        pending.size(), config_.gateway.parallelism,
        [&](std::size_t i) {
            const auto [q, d] = pending[i];
            json row = {{"question_id", questions[q].id}, {"dialect", dname(d)}, {"config_hash", hash_}};
            try {
                const auto result = retriever.retrieve(tagged[q], query_vecs[q], d, config_.retrieval.fewshot_k);
                std::vector<std::string> ids;
                for (const auto& c : result.candidates) ids.push_back(c.pair_id);
                row["candidates"] = ids;
                row["short_profile"] = result.short_profile;
                row["deep_search_used"] = result.deep_search_used;
                const auto prompt = retrieval::build_fewshot_prompt(result.candidates, tagged[q], d);
                row["prompt_sha256"] = sha256_hex(prompt);
                const auto text = trimmed(call(request(config_.translator_model, prompt, judging::ResponseFormat::Text,
                                                      {{"stage", "translate"},
                                                       {"question_id", questions[q].id},
                                                       {"dialect", dname(d)},
                                                       {"model", config_.translator_model}})));
                if (text.empty()) throw GatewayFailure(Errc::GatewayError, "empty translation", 200, false);
                row["status"] = "ok";
                row["text"] = text;
            } catch (const Error& e) {
                if (!is_sentinel_error(e)) throw;
                row["status"] = "failed";
                row["error"] = e.what();
            }
            return row;
        },
        [&](std::size_t, json&& row) {
            if (row["status"] != "ok") ++s.failed;
            if (log.append(std::move(row))) ++s.written;
        });
    log_summary(s);
    return s;
}

StageSummary Run::respond() {
    StageSummary s{"respond"};
    const auto questions = corpus::load_questions(config_.questions);

    std::map<std::pair<std::string, Dialect>, std::string> dialect_q;
    for (const auto& q : questions) {
        for (const auto& [d, text] : q.variants) dialect_q[{q.id, d}] = text;
    }
    for (const auto& row : rows_for(paths_.translations(), hash_)) {
        if (row.at("status") == "ok") {
            dialect_q[{row.at("question_id").get<std::string>(), corpus::parse_dialect(row.at("dialect").get<std::string>())}] =
                row.at("text").get<std::string>();
        }
    }

    std::map<Dialect, std::string> templates;
    templates[Dialect::Standard] = load_answer_template(config_.answer_templates, Dialect::Standard);
    for (auto d : config_.dialects) templates[d] = load_answer_template(config_.answer_templates, d);

    auto ask = [&](const std::string& model, const std::string& qid, Dialect d, const std::string& question) {
        const auto prompt = render_template(templates.at(d), {{"question", question}});
        return trimmed(call(request(model, prompt, judging::ResponseFormat::Text,
                                    {{"stage", "respond"}, {"question_id", qid}, {"dialect", dname(d)}, {"model", model}})));
    };

    // Standard-side answers, one per (question, model).
    RunLog std_log = standard_log(paths_);
    std::vector<std::pair<std::size_t, std::string>> std_pending;
    for (std::size_t q = 0; q < questions.size(); ++q) {
        for (const auto& m : config_.models) {
            if (!std_log.completed(join_key({questions[q].id, m, hash_}))) std_pending.emplace_back(q, m);
        }
    }
    run_ordered<json>(
        std_pending.size(), config_.gateway.parallelism,
        [&](std::size_t i) {
            const auto& [q, model] = std_pending[i];
            json row = {{"question_id", questions[q].id}, {"model", model}, {"config_hash", hash_}};
            try {
                row["response"] = ask(model, questions[q].id, Dialect::Standard, questions[q].standard_q);
                row["status"] = "ok";
            } catch (const Error& e) {
                if (!is_sentinel_error(e)) throw;
                row["status"] = "failed";
                row["error"] = e.what();
            }
            return row;
        },
        [&](std::size_t, json&& row) { std_log.append(std::move(row)); });

    std::map<std::pair<std::string, std::string>, const json*> std_rows;
    for (const auto& row : std_log.rows()) {
        if (row.at("config_hash") == hash_) {
            std_rows[{row.at("question_id").get<std::string>(), row.at("model").get<std::string>()}] = &row;
        }
    }

    RunLog log = response_log(paths_);
    struct Item {
        std::size_t q;
        Dialect d;
        std::string model;
    };
    std::vector<Item> pending;
    for (std::size_t q = 0; q < questions.size(); ++q) {
        for (auto d : config_.dialects) {
            for (const auto& m : config_.models) {
                ++s.total;
                if (log.completed(join_key({questions[q].id, dname(d), m, hash_}))) {
                    ++s.skipped;
                } else {
                    pending.push_back({q, d, m});
                }
            }
        }
    }
    run_ordered<json>(
        pending.size(), config_.gateway.parallelism,
        [&](std::size_t i) {
            const auto& [q, d, model] = pending[i];
            const auto& qs = questions[q];
            const json& std_row = *std_rows.at({qs.id, model});
            json row = {{"question_id", qs.id},
                        {"dialect", dname(d)},
                        {"model", model},
                        {"standard_question", qs.standard_q},
                        {"config_hash", hash_}};
            auto fail = [&](const std::string& msg) {
                row["status"] = "failed";
                row["error"] = msg;
                return row;
            };
            auto dq = dialect_q.find({qs.id, d});
            if (dq == dialect_q.end()) return fail("no dialect question");
            row["dialect_question"] = dq->second;
            if (std_row.at("status") != "ok") return fail("standard response failed: " + std_row.value("error", ""));
            row["standard_response"] = std_row.at("response");
            try {
                const auto answer = ask(model, qs.id, d, dq->second);
                row["dialect_response"] = answer;
                row["refusal_flag"] = judging::looks_like_refusal(answer);
                row["dialect_bengali_ratio"] = utf8::bengali_script_ratio(answer);
                row["status"] = "ok";
            } catch (const Error& e) {
                if (!is_sentinel_error(e)) throw;
                return fail(e.what());
            }
            return row;
        },
        [&](std::size_t, json&& row) {
            if (row["status"] != "ok") ++s.failed;
            if (log.append(std::move(row))) ++s.written;
        });
    log_summary(s);
    return s;
}

StageSummary Run::judge() {
    StageSummary s{"judge"};
    const auto responses = rows_for(paths_.responses(), hash_);
    if (responses.empty()) throw Error(Errc::EmptyLog, "no responses for this config; run the respond stage first");
    const auto judges = config_.judges();

    RunLog log = verdict_log(paths_);
    struct Item {
        const json* response;
        std::string judge;
    };
    std::vector<Item> pending;
    for (const auto& r : responses) {
        for (const auto& j : judges) {
            ++s.total;
            const auto key = join_key({r.at("question_id").get<std::string>(), r.at("dialect").get<std::string>(),
                                       r.at("model").get<std::string>(), j, hash_});
            if (log.completed(key)) {
                ++s.skipped;
            } else {
                pending.push_back({&r, j});
            }
        }
    }

    run_ordered<json>(
        pending.size(), config_.gateway.parallelism,
        [&](std::size_t i) {
            const json& r = *pending[i].response;
            VerdictRow row;
            row.question_id = r.at("question_id").get<std::string>();
            row.dialect = corpus::parse_dialect(r.at("dialect").get<std::string>());
            row.model = r.at("model").get<std::string>();
            row.judge = pending[i].judge;
            row.primary = row.judge == config_.primary_judge;
            row.config_hash = hash_;
            row.verdict_ref = make_verdict_ref(row.question_id, row.dialect, row.model, row.judge, hash_);
            if (r.at("status") != "ok") {
                row.failed = true;
                row.error = "upstream: " + r.value("error", "response failed");
                return to_json(row);
            }
            const auto prompt = judging::build_bias_judge_prompt(
                r.at("standard_question").get<std::string>(), r.at("dialect_question").get<std::string>(),
                r.at("standard_response").get<std::string>(), r.at("dialect_response").get<std::string>(),
                row.dialect, config_.statements, config_.weights, config_.bias_judge_template);
            std::string last_error;
            for (int attempt = 1; attempt <= config_.judge_max_attempts; ++attempt) {
                std::string raw;
                try {
                    raw = call(request(row.judge, prompt, judging::ResponseFormat::Json,
                                       {{"stage", "judge"},
                                        {"question_id", row.question_id},
                                        {"dialect", dname(row.dialect)},
                                        {"model", row.model},
                                        {"judge", row.judge},
                                        {"attempt", std::to_string(attempt)}}));
                } catch (const Error& e) {
                    if (!is_sentinel_error(e)) throw;
                    last_error = e.what();
                    break;
                }
                try {
                    row.verdict = judging::apply_script_gate(judging::parse_bias_verdict(raw, config_.strict_json),
                                                             config_.weights);
                    return to_json(row);
                } catch (const Error& e) {
                    last_error = fmt::format("unparseable verdict (attempt {}): {}", attempt, e.what());
                    spdlog::debug("{} {}: {}", row.verdict_ref, row.judge, last_error);
                }
            }
            row.failed = true;
            row.error = last_error;
            return to_json(row);
        },
        [&](std::size_t, json&& row) {
            if (row["status"] != "ok") ++s.failed;
            if (log.append(std::move(row))) ++s.written;
        });
    const auto queued = rebuild_fallback_queue();
    spdlog::info("judge: {} items in the fallback queue", queued);
    log_summary(s);
    return s;
}

std::size_t Run::rebuild_fallback_queue() {
    std::map<std::string, FallbackItem> previous;
    for (auto& item : load_fallback_queue(paths_.fallback())) previous.emplace(item.verdict_ref, std::move(item));

    std::map<std::tuple<std::string, std::string, std::string>, json> responses;
    for (auto& r : rows_for(paths_.responses(), hash_)) {
        responses.emplace(std::make_tuple(r.at("question_id").get<std::string>(), r.at("dialect").get<std::string>(),
                                          r.at("model").get<std::string>()),
                          std::move(r));
    }

    std::vector<FallbackItem> items;
    for (const auto& j : rows_for(paths_.verdicts(), hash_)) {
        const VerdictRow row = verdict_from_json(j);
        if (!row.primary || row.failed || !judging::needs_human_fallback(row.verdict)) continue;
        const json& r = responses.at({row.question_id, dname(row.dialect), row.model});
        FallbackItem item;
        item.verdict_ref = row.verdict_ref;
        item.question_id = row.question_id;
        item.dialect = row.dialect;
        item.model_name = row.model;
        item.payload.standard_question = r.value("standard_question", "");
        item.payload.dialect_question = r.value("dialect_question", "");
        item.payload.standard_response = r.value("standard_response", "");
        item.payload.dialect_response = r.value("dialect_response", "");
        item.payload.response_refusal_flag = r.value("refusal_flag", false);
        item.machine = row.verdict;
        if (auto it = previous.find(item.verdict_ref); it != previous.end()) {
            item.human_override = it->second.human_override;
            item.note = it->second.note;
        }
        items.push_back(std::move(item));
    }
    save_fallback_queue(paths_.fallback(), items);
    return items.size();
}

json Run::agree() {
    std::vector<VerdictRow> rows;
    for (const auto& j : rows_for(paths_.verdicts(), hash_)) rows.push_back(verdict_from_json(j));
    if (rows.empty()) throw Error(Errc::EmptyLog, "no verdicts for this config; run the judge stage first");

    using Key = std::tuple<std::string, Dialect, std::string>;
    std::map<std::string, std::map<Key, double>> scores;
    std::vector<Key> order;
    for (const auto& r : rows) {
        if (r.failed) continue;
        const Key key{r.question_id, r.dialect, r.model};
        if (r.primary) order.push_back(key);
        scores[r.judge][key] = r.verdict.final_score;
    }

    json pairs = json::array();
    std::string table = fmt::format("{:<24} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>6} {:>6}\n", "Judge pair", "n",
                                    "CCC", "CBS", "Pearson", "Spearman", "MAE", "CCC ok", "CBS ok");
    for (const auto& other : config_.secondary_judges) {
        json pj = {{"judge_a", config_.primary_judge}, {"judge_b", other}};
        std::vector<std::string> ids;
        std::vector<double> a, b;
        for (const auto& key : order) {
            auto it = scores[other].find(key);
            if (it == scores[other].end()) continue;
            ids.push_back(fmt::format("{}|{}|{}", std::get<0>(key), dname(std::get<1>(key)), std::get<2>(key)));
            a.push_back(scores[config_.primary_judge].at(key));
            b.push_back(it->second);
        }
        pj["n_items"] = ids.size();
        const auto label = config_.primary_judge + " vs " + other;
        try {
            const agreement::ScoreSeries series(ids, a, b, config_.cbs.scale_max);
            const auto rep = agreement::agreement_report(series, config_.cbs, config_.variance);
            pj["ccc"] = rep.ccc;
            pj["cbs"] = rep.cbs ? json(*rep.cbs) : json(nullptr);
            pj["pearson"] = rep.pearson;
            pj["spearman"] = rep.spearman;
            pj["mae"] = rep.mae;
            pj["n_critical"] = rep.n_critical;
            pj["passes_ccc"] = rep.passes_ccc;
            pj["passes_cbs"] = rep.passes_cbs;
            table += fmt::format("{:<24} {:>6} {:>8.4f} {:>8} {:>8.4f} {:>8.4f} {:>8.4f} {:>6} {:>6}\n", label,
                                 rep.n_items, rep.ccc, rep.cbs ? fmt::format("{:.4f}", *rep.cbs) : "n/a",
                                 rep.pearson, rep.spearman, rep.mae, rep.passes_ccc ? "yes" : "no",
                                 rep.passes_cbs ? "yes" : "no");
        } catch (const Error& e) {
            pj["error"] = std::string(errc_name(e.code())) + ": " + e.what();
            pj["passes_ccc"] = false;
            pj["passes_cbs"] = false;
            table += fmt::format("{:<24} {:>6} {}\n", label, ids.size(), pj["error"].get<std::string>());
        }
        pairs.push_back(std::move(pj));
    }
    json doc = {{"run_id", run_id_},
                {"config_hash", hash_},
                {"primary", config_.primary_judge},
                {"thresholds",
                 {{"ccc", agreement::kCccThreshold},
                  {"cbs", agreement::kCbsThreshold},
                  {"critical_score", config_.cbs.threshold}}},
                {"pairs", pairs}};
    write_atomic(paths_.agreement_json(), doc.dump(2) + "\n");
    write_atomic(paths_.agreement_txt(), table);
    return doc;
}

json Run::report() {
    std::vector<VerdictRow> rows;
    for (const auto& j : rows_for(paths_.verdicts(), hash_)) rows.push_back(verdict_from_json(j));
    const auto merged = merge_human_overrides(std::move(rows), load_fallback_queue(paths_.fallback()));

    std::map<std::string, std::vector<VerdictRow>> by_judge;
    std::size_t overrides = 0;
    for (const auto& r : merged) {
        by_judge[r.judge].push_back(r);
        if (r.human) ++overrides;
    }
    const auto primary = aggregate_bias_table(by_judge[config_.primary_judge]);
    json judges = json::object();
    for (const auto& [judge, judge_rows] : by_judge) judges[judge] = to_json(aggregate_bias_table(judge_rows));

    json doc = {{"run_id", run_id_},
                {"config_hash", hash_},
                {"primary", config_.primary_judge},
                {"human_overrides", overrides},
                {"table", to_json(primary)},
                {"by_judge", judges}};
    write_atomic(paths_.report_json(), doc.dump(2) + "\n");
    write_atomic(paths_.report_txt(),
                 fmt::format("Primary judge: {}  human overrides: {}\n\n{}", config_.primary_judge, overrides,
                             format_bias_table(primary)));
    return doc;
}

}  // namespace de::pipeline
