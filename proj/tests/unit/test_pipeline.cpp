#include <doctest.h>

#include <chrono>
#include <fstream>
#include <random>
#include <thread>

#include "dialect_eval/judging/mock_gateway.hpp"
#include "dialect_eval/pipeline/config.hpp"
#include "dialect_eval/pipeline/executor.hpp"
#include "dialect_eval/pipeline/run.hpp"
#include "dialect_eval/pipeline/runlog.hpp"
#include "dialect_eval/pipeline/verdicts.hpp"
#include "support/helpers.hpp"
#include "support/run_fixture.hpp"

using namespace de::pipeline;
using de::Errc;
using de::corpus::Dialect;
using de::judging::MockConfig;
using de::judging::MockFailureMode;
using de::judging::MockTransport;
using nlohmann::json;
using testing::error_of;

namespace {

VerdictRow row(std::string q, Dialect d, std::string model, double score, std::string judge = "j") {
    VerdictRow r;
    r.question_id = std::move(q);
    r.dialect = d;
    r.model = std::move(model);
    r.judge = std::move(judge);
    r.primary = true;
    r.verdict.final_score = score;
    r.verdict.confidence = 5;
    r.verdict_ref = make_verdict_ref(r.question_id, r.dialect, r.model, r.judge, "h");
    return r;
}

std::string judge_verdict(bool script_valid, int confidence) {
    de::judging::BiasVerdict v;
    v.likert = {4, 4, 4, 4, 4};
    v.script_valid = script_valid;
    v.confidence = confidence;
    v.reasoning = "fixed";
    return de::judging::serialize_bias_verdict(v);
}

}  // namespace

TEST_CASE("config") {
    testing::RunFixture fx;
    const auto& c = fx.config;
    CHECK(c.dialects.size() == 3);
    CHECK(c.judges() == std::vector<std::string>{"judge-a", "judge-b"});
    CHECK(c.corpus.is_absolute());
    CHECK(std::filesystem::exists(c.corpus));
    CHECK(c.effective_run_id().size() == 12);
    CHECK(c.hash().substr(0, 12) == c.effective_run_id());

    auto moved = c;
    moved.workdir = "/elsewhere";
    moved.run_id = "named";
    moved.gateway.parallelism = 1;
    CHECK(moved.hash() == c.hash());
    CHECK(moved.effective_run_id() == "named");
    auto reweighted = c;
    reweighted.weights = reweighted.weights.scaled(1.0);
    reweighted.weights.values[0] = 2.0;
    reweighted.weights.values[1] = 3.5;
    CHECK(reweighted.hash() != c.hash());

    CHECK(error_of([] { parse_config(R"({"bogus": 1})"); }) == Errc::InvalidConfig);
    CHECK(error_of([] { parse_config("not json"); }) == Errc::InvalidConfig);
    auto bad = c;
    bad.primary_judge.clear();
    CHECK(error_of([&] { bad.validate(); }) == Errc::InvalidConfig);
    bad = c;
    bad.dialects.push_back(Dialect::Standard);
    CHECK(error_of([&] { bad.validate(); }) == Errc::InvalidConfig);
    bad = c;
    bad.weights.values[0] = 9;
    CHECK(error_of([&] { bad.validate(); }) == Errc::InvalidConfig);
}

TEST_CASE("run log") {
    testing::TempDir dir;
    const auto path = dir.path() / "log.jsonl";
    auto key = [](const json& r) { return r.at("k").get<std::string>(); };
    {
        RunLog log(path, key);
        CHECK(log.append({{"k", "a"}, {"v", 1}}));
        CHECK(log.append({{"k", "b"}, {"v", 2}}));
        CHECK_FALSE(log.append({{"k", "a"}, {"v", 3}}));
        CHECK(log.append({{"k", "c"}, {"v", 4}}));
    }
    const auto rows = RunLog::read(path);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]["row_hash"] == row_hash(rows[0]));
    const std::string intact = testing::read_file(path);

    SUBCASE("reopen") {
        RunLog log(path, key);
        CHECK(log.completed("b"));
        CHECK_FALSE(log.completed("z"));
        CHECK(log.size() == 3);
    }
    SUBCASE("torn tail is truncated") {
        std::ofstream(path, std::ios::app) << R"({"k":"d","v":)";
        {
            RunLog log(path, key);
            CHECK(log.size() == 3);
            CHECK_FALSE(log.completed("d"));
        }
        CHECK(testing::read_file(path) == intact);
    }
    SUBCASE("tampered row is corrupt") {
        std::string text = intact;
        text.replace(text.find("\"v\":2"), 5, "\"v\":9");
        testing::write_file(path, text);
        CHECK(error_of([&] { RunLog log(path, key); }) == Errc::CorruptLog);
        CHECK(error_of([&] { RunLog::read(path); }) == Errc::CorruptLog);
    }
}

TEST_CASE("write_atomic") {
    testing::TempDir dir;
    write_atomic(dir.path() / "f.txt", "one");
    write_atomic(dir.path() / "f.txt", "two");
    CHECK(testing::read_file(dir.path() / "f.txt") == "two");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
    CHECK(files == 1);
}

TEST_CASE("ordered executor") {
    std::mt19937 rng(1);
    std::vector<int> delays(60);
    for (auto& d : delays) d = static_cast<int>(rng() % 300);
    std::function<int(std::size_t)> work = [&](std::size_t i) {
        std::this_thread::sleep_for(std::chrono::microseconds(delays[i]));
        if (i == 40) throw de::Error(Errc::Killed, "stop");
        return static_cast<int>(i) * 2;
    };
    std::vector<std::size_t> seen;
    std::function<void(std::size_t, int&&)> sink = [&](std::size_t i, int&& v) {
        CHECK(v == static_cast<int>(i) * 2);
        seen.push_back(i);
    };
    SUBCASE("delivers in order") {
        run_ordered<int>(40, 4, work, sink);
        REQUIRE(seen.size() == 40);
        for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i);
    }
    SUBCASE("delivers everything before a failure") {
        CHECK(error_of([&] { run_ordered<int>(60, 4, work, sink); }) == Errc::Killed);
        REQUIRE(seen.size() == 40);
        CHECK(seen.back() == 39);
    }
}

TEST_CASE("human verdicts and overrides") {
    const de::judging::RubricWeights w;
    const auto h = make_human_verdict({5, 4, 3, 2, 1}, true, "n", w);
    CHECK(h.final_score == doctest::Approx(7.0));
    CHECK(h.confidence == 5);
    const auto gated = make_human_verdict({5, 4, 3, 2, 1}, false, "n", w);
    CHECK(gated.final_score == 0.0);
    CHECK(gated.confidence == 1);

    std::vector<VerdictRow> rows{row("q1", Dialect::Sylhet, "m", 0.0), row("q2", Dialect::Sylhet, "m", 8.0)};
    CHECK(merge_human_overrides(rows, {}).at(0).score() == 0.0);

    FallbackItem item;
    item.verdict_ref = rows[0].verdict_ref;
    CHECK_FALSE(merge_human_overrides(rows, {item})[0].human.has_value());
    item.human_override = make_human_verdict({3, 3, 3, 3, 3}, true, "", w);
    const auto merged = merge_human_overrides(rows, {item});
    CHECK(merged[0].score() == doctest::Approx(6.0));
    CHECK(merged[0].verdict.final_score == 0.0);
    CHECK(aggregate_bias_table(merged).cells.at({"m", Dialect::Sylhet}).mean == doctest::Approx(7.0));

    FallbackItem unknown = item;
    unknown.verdict_ref = "v-0000000000000000";
    CHECK(error_of([&] { merge_human_overrides(rows, {unknown}); }) == Errc::UnknownVerdictRef);
}

TEST_CASE("bias table") {
    const auto t = aggregate_bias_table({row("q1", Dialect::Sylhet, "m", 8.0), row("q1", Dialect::Rangpur, "m", 6.0)});
    CHECK(t.row_avg.at("m") == doctest::Approx(7.0));
    CHECK(t.cells.size() == 2);

    const auto single = aggregate_bias_table({row("q1", Dialect::Sylhet, "m", 4.4)});
    CHECK(single.cells.at({"m", Dialect::Sylhet}).mean == doctest::Approx(4.4));
    CHECK(single.cells.at({"m", Dialect::Sylhet}).count == 1);

    auto failed = row("q2", Dialect::Sylhet, "m", 0.0);
    failed.failed = true;
    const auto with_sentinel = aggregate_bias_table({row("q1", Dialect::Sylhet, "m", 4.0), failed});
    CHECK(with_sentinel.cells.at({"m", Dialect::Sylhet}).mean == doctest::Approx(4.0));
    CHECK(with_sentinel.sentinel_rows == 1);
    CHECK(with_sentinel.sentinels.at("m") == 1);
    CHECK(with_sentinel.total_rows == 2);

    // column average over models, row average over dialects
    const auto two = aggregate_bias_table({row("q1", Dialect::Sylhet, "a", 2.0), row("q2", Dialect::Sylhet, "a", 4.0),
                                           row("q1", Dialect::Sylhet, "b", 9.0), row("q1", Dialect::Rangpur, "b", 5.0)});
    CHECK(two.col_avg.at(Dialect::Sylhet) == doctest::Approx(6.0));
    CHECK(two.row_avg.at("b") == doctest::Approx(7.0));
    CHECK_FALSE(format_bias_table(two).empty());

    CHECK(error_of([] { aggregate_bias_table({}); }) == Errc::EmptyLog);
}

TEST_CASE("verdict row json round trip") {
    auto r = row("q9", Dialect::Noakhali, "m", 6.4, "judge-x");
    r.verdict.likert = {3, 3, 3, 4, 3};
    r.config_hash = "abc";
    const auto back = verdict_from_json(to_json(r));
    CHECK(back.verdict == r.verdict);
    CHECK(back.verdict_ref == r.verdict_ref);
    CHECK(back.dialect == Dialect::Noakhali);
    CHECK(error_of([] { verdict_from_json(json{{"x", 1}}); }) == Errc::CorruptLog);
}

TEST_CASE("answer templates") {
    const auto dir = testing::data_dir / "templates" / "answer";
    CHECK(load_answer_template(dir, Dialect::Sylhet).find("ফশ্নটার") != std::string::npos);
    CHECK(load_answer_template(dir, Dialect::Noakhali) == load_answer_template(dir, Dialect::Standard));
}

TEST_CASE("index stage") {
    testing::RunFixture fx;
    MockTransport t;
    Run run(fx.config, t);
    const auto s = run.index();
    CHECK(s.written == 50);
    const auto manifest = json::parse(testing::read_file(run.paths().manifest()));
    CHECK(manifest["entries"].size() == 50);
    const auto calls = t.embed_calls();
    CHECK(calls > 0);
    run.index();
    CHECK(t.embed_calls() == calls);
    CHECK(json::parse(testing::read_file(run.paths().manifest())) == manifest);
}

TEST_CASE("translate stage") {
    testing::RunFixture fx;
    fx.limit_questions(2);
    fx.config.dialects = {Dialect::Sylhet, Dialect::Rangpur};

    SUBCASE("one row per question and dialect") {
        MockTransport t;
        Run run(fx.config, t);
        run.index();
        const auto s = run.translate();
        CHECK(s.written == 4);
        CHECK(s.failed == 0);
        CHECK(testing::read_rows(run.paths().translations()).size() == 4);
    }
    SUBCASE("gateway down") {
        MockConfig cfg;
        cfg.failures.push_back({{{"stage", "translate"}}, MockFailureMode::Transient, -1});
        MockTransport t(cfg);
        Run run(fx.config, t);
        run.index();
        const auto s = run.translate();
        CHECK(s.written == 4);
        CHECK(s.failed == 4);
        for (const auto& r : testing::read_rows(run.paths().translations())) CHECK(r["status"] == "failed");
    }
    SUBCASE("resume after interrupt") {
        MockConfig cfg;
        cfg.kill_after_calls = 2;
        cfg.kill_stage = "translate";
        fx.config.gateway.parallelism = 1;
        {
            MockTransport t(cfg);
            Run run(fx.config, t);
            run.index();
            CHECK(error_of([&] { run.translate(); }) == Errc::Killed);
            CHECK(testing::read_rows(run.paths().translations()).size() == 2);
        }
        MockTransport fresh;
        Run run(fx.config, fresh, fx.config.effective_run_id());
        const auto s = run.translate();
        CHECK(s.skipped == 2);
        CHECK(s.written == 2);
        CHECK(fresh.chat_calls() == 2);
    }
}

TEST_CASE("respond stage cardinality") {
    testing::RunFixture fx;
    fx.limit_questions(1);
    fx.config.dialects.clear();
    for (auto d : de::corpus::kRegionalDialects) fx.config.dialects.push_back(d);
    MockTransport t;
    Run run(fx.config, t);
    run.index();
    run.translate();
    const auto s = run.respond();
    CHECK(s.total == 18);
    CHECK(s.written == 18);
    CHECK(testing::read_rows(run.paths().responses()).size() == 18);
}

TEST_CASE("judge stage") {
    testing::RunFixture fx;
    fx.limit_questions(1);
    fx.config.dialects = {Dialect::Sylhet};
    fx.config.models = {"model-a"};

    SUBCASE("low confidence and script failures reach the fallback queue") {
        MockTransport t;
        t.set_responder([](const de::judging::GatewayRequest& req) -> std::optional<std::string> {
            if (req.tags.at("stage") != "judge") return std::nullopt;
            return req.tags.at("judge") == "judge-a" ? judge_verdict(false, 5) : judge_verdict(true, 2);
        });
        Run run(fx.config, t);
        run.index();
        run.translate();
        run.respond();
        const auto s = run.judge();
        CHECK(s.written == 2);
        const auto rows = load_verdicts(run.paths().verdicts());
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].verdict.final_score == 0.0);
        CHECK(rows[0].verdict.confidence == 1);
        CHECK(rows[1].verdict.final_score == doctest::Approx(8.0));
        const auto queue = load_fallback_queue(run.paths().fallback());
        REQUIRE(queue.size() == 1);
        CHECK(queue[0].verdict_ref == rows[0].verdict_ref);
        CHECK(queue[0].status() == FallbackStatus::Pending);
    }
    SUBCASE("confident verdicts skip the queue") {
        MockTransport t;
        t.set_responder([](const de::judging::GatewayRequest& req) -> std::optional<std::string> {
            if (req.tags.at("stage") != "judge") return std::nullopt;
            return judge_verdict(true, 4);
        });
        Run run(fx.config, t);
        run.index();
        run.translate();
        run.respond();
        run.judge();
        CHECK(load_fallback_queue(run.paths().fallback()).empty());
    }
    SUBCASE("unparseable verdicts are re-queried then recorded as sentinels") {
        MockConfig cfg;
        cfg.failures.push_back({{{"stage", "judge"}, {"judge", "judge-b"}}, MockFailureMode::Malformed, -1});
        MockTransport t(cfg);
        Run run(fx.config, t);
        run.index();
        run.translate();
        run.respond();
        const auto before = t.chat_calls();
        const auto s = run.judge();
        CHECK(s.failed == 1);
        CHECK(t.chat_calls() - before == 1 + 2);
        const auto rows = load_verdicts(run.paths().verdicts());
        CHECK(rows[1].failed);
        CHECK(rows[1].error.find("unparseable") != std::string::npos);
    }
    SUBCASE("judge needs responses") {
        MockTransport t;
        Run run(fx.config, t);
        CHECK(error_of([&] { run.judge(); }) == Errc::EmptyLog);
    }
}
