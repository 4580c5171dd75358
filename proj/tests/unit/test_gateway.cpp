#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dialect_eval/judging/bias_judge.hpp"
#include "dialect_eval/judging/gateway.hpp"
#include "dialect_eval/judging/mock_gateway.hpp"
#include "dialect_eval/judging/translation_judge.hpp"
#include "support/helpers.hpp"

using namespace de::judging;
using de::Errc;
using testing::error_of;

namespace {

RetryPolicy no_sleep() {
    RetryPolicy p;
    p.sleep = [](std::chrono::milliseconds) {};
    return p;
}

GatewayRequest chat(std::string stage, int max_attempts = 3) {
    GatewayRequest r;
    r.model_name = "m";
    r.prompt = "hello";
    r.max_attempts = max_attempts;
    r.tags = {{"stage", std::move(stage)}, {"question_id", "q1"}, {"dialect", "Sylhet"}};
    return r;
}

MockConfig failing(MockFailureMode mode, int times) {
    MockConfig cfg;
    cfg.failures.push_back({{{"stage", "translate"}}, mode, times});
    return cfg;
}

/// Local HTTP endpoint that fails the first `failures` chat calls with `status`.
struct FakeGateway {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> calls{0};
    int failures = 0;
    int status = 503;
    std::string last_auth;

    FakeGateway() {
        server.Post("/api/v1/chat", [this](const httplib::Request& req, httplib::Response& res) {
            last_auth = req.get_header_value("Authorization");
            if (calls++ < failures) {
                res.status = status;
                res.set_content("nope", "text/plain");
                return;
            }
            const auto body = nlohmann::json::parse(req.body);
            res.set_content(nlohmann::json{{"text", "echo " + body["messages"][0]["content"].get<std::string>()}}.dump(),
                            "application/json");
        });
        server.Post("/api/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            nlohmann::json out = nlohmann::json::array();
            for (std::size_t i = 0; i < body["input"].size(); ++i) out.push_back({1.0, static_cast<double>(i)});
            res.set_content(nlohmann::json{{"embeddings", out}}.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeGateway() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/api"; }
};

}  // namespace

TEST_CASE("request hash ignores tags") {
    auto a = chat("translate");
    auto b = a;
    b.tags["judge"] = "x";
    CHECK(a.request_hash() == b.request_hash());
    b.prompt = "other";
    CHECK(a.request_hash() != b.request_hash());
    b = a;
    b.model_name = "n";
    CHECK(a.request_hash() != b.request_hash());
}

TEST_CASE("retry delays") {
    RetryPolicy p;
    p.base_delay = std::chrono::milliseconds(100);
    p.max_delay = std::chrono::milliseconds(350);
    CHECK(p.delay_for(1).count() == 100);
    CHECK(p.delay_for(2).count() == 200);
    CHECK(p.delay_for(3).count() == 350);
}

TEST_CASE("gateway retries") {
    SUBCASE("healthy") {
        MockTransport t;
        AttemptLog log;
        CHECK_FALSE(call_gateway(t, chat("translate"), log, no_sleep()).empty());
        REQUIRE(log.size() == 1);
        CHECK(log.records()[0].outcome == "ok");
    }
    SUBCASE("fails twice then succeeds") {
        MockTransport t(failing(MockFailureMode::Transient, 2));
        AttemptLog log;
        std::vector<long long> slept;
        auto policy = no_sleep();
        policy.base_delay = std::chrono::milliseconds(10);
        policy.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d.count()); };
        CHECK_FALSE(call_gateway(t, chat("translate"), log, policy).empty());
        const auto recs = log.records();
        REQUIRE(recs.size() == 3);
        CHECK(recs[0].outcome == "transient");
        CHECK(recs[0].status == 503);
        CHECK(recs[1].attempt == 2);
        CHECK(recs[2].outcome == "ok");
        CHECK(slept == std::vector<long long>{10, 20});
    }
    SUBCASE("always failing") {
        MockTransport t(failing(MockFailureMode::Transient, -1));
        AttemptLog log;
        CHECK(error_of([&] { call_gateway(t, chat("translate"), log, no_sleep()); }) == Errc::ExhaustedRetries);
        CHECK(log.size() == 3);
    }
    SUBCASE("fatal is not retried") {
        MockTransport t(failing(MockFailureMode::Fatal, -1));
        AttemptLog log;
        CHECK(error_of([&] { call_gateway(t, chat("translate"), log, no_sleep()); }) == Errc::GatewayError);
        CHECK(log.size() == 1);
        CHECK(log.records()[0].outcome == "fatal");
    }
    SUBCASE("invalid attempt budget") {
        MockTransport t;
        AttemptLog log;
        CHECK(error_of([&] { call_gateway(t, chat("translate", 0), log, no_sleep()); }) == Errc::InvalidArgument);
    }
}

TEST_CASE("attempt log file mirror") {
    testing::TempDir dir;
    {
        AttemptLog log(dir.path() / "attempts.jsonl");
        MockTransport t(failing(MockFailureMode::Transient, 1));
        call_gateway(t, chat("translate"), log, no_sleep());
    }
    const auto text = testing::read_file(dir.path() / "attempts.jsonl");
    std::istringstream in(text);
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["outcome"] == "transient");
    CHECK(rows[1]["outcome"] == "ok");
    CHECK(rows[1]["tags"]["stage"] == "translate");
}

TEST_CASE("mock transport") {
    SUBCASE("deterministic verdicts") {
        const RequestTags tags{{"stage", "judge"}, {"question_id", "q1"}, {"dialect", "Sylhet"}, {"model", "a"}, {"judge", "j"}};
        CHECK(MockTransport::default_bias_verdict(tags) == MockTransport::default_bias_verdict(tags));
        CHECK_NOTHROW(parse_bias_verdict(MockTransport::default_bias_verdict(tags), true));
        for (int i = 0; i < 50; ++i) {
            auto t = tags;
            t["question_id"] = "q" + std::to_string(i);
            const auto v = parse_translation_verdict(MockTransport::default_translation_verdict(t), true);
            CHECK(check_rubric_ceilings(v).empty());
        }
    }
    SUBCASE("malformed once per request") {
        MockTransport t(failing(MockFailureMode::Malformed, 1));
        AttemptLog log;
        const auto first = call_gateway(t, chat("translate"), log, no_sleep());
        const auto second = call_gateway(t, chat("translate"), log, no_sleep());
        CHECK(first != second);
        CHECK(error_of([&] { parse_bias_verdict(first); }) == Errc::MalformedJson);
    }
    SUBCASE("match on model name") {
        MockConfig cfg;
        cfg.failures.push_back({{{"model_name", "m"}}, MockFailureMode::Fatal, -1});
        MockTransport t(cfg);
        AttemptLog log;
        CHECK(error_of([&] { call_gateway(t, chat("respond"), log, no_sleep()); }) == Errc::GatewayError);
        auto other = chat("respond");
        other.model_name = "n";
        CHECK_NOTHROW(call_gateway(t, other, log, no_sleep()));
    }
    SUBCASE("kill switch") {
        MockConfig cfg;
        cfg.kill_after_calls = 2;
        cfg.kill_stage = "judge";
        MockTransport t(cfg);
        AttemptLog log;
        CHECK_NOTHROW(call_gateway(t, chat("translate"), log, no_sleep()));
        CHECK_NOTHROW(call_gateway(t, chat("judge"), log, no_sleep()));
        CHECK_NOTHROW(call_gateway(t, chat("judge"), log, no_sleep()));
        CHECK(error_of([&] { call_gateway(t, chat("judge"), log, no_sleep()); }) == Errc::Killed);
        CHECK(log.records().back().outcome == "killed");
    }
    SUBCASE("canned and responder") {
        MockConfig cfg;
        cfg.canned[mock_key({{"stage", "translate"}, {"question_id", "q1"}, {"dialect", "Sylhet"}})] = "canned!";
        MockTransport t(cfg);
        AttemptLog log;
        CHECK(call_gateway(t, chat("translate"), log, no_sleep()) == "canned!");
        t.set_responder([](const GatewayRequest&) { return std::optional<std::string>("custom"); });
        CHECK(call_gateway(t, chat("translate"), log, no_sleep()) == "custom");
    }
    SUBCASE("config parsing") {
        const auto cfg = parse_mock_config(
            R"({"failures":[{"match":{"judge":"b"},"mode":"malformed","times":1}],"kill_after_calls":5,"embedding_dim":8})");
        REQUIRE(cfg.failures.size() == 1);
        CHECK(cfg.failures[0].mode == MockFailureMode::Malformed);
        CHECK(cfg.kill_after_calls == 5u);
        CHECK(cfg.embedding_dim == 8);
        CHECK(error_of([] { parse_mock_config("{\"failures\":[{\"mode\":\"weird\"}]}"); }) == Errc::InvalidConfig);
        CHECK(error_of([] { parse_mock_config("not json"); }) == Errc::InvalidConfig);
    }
    SUBCASE("embeddings") {
        MockTransport t;
        AttemptLog log;
        GatewayEmbedder e(t, log, "emb", no_sleep(), 2);
        const std::vector<std::string> texts{"ক", "খ", "গ"};
        const auto vecs = e.embed(texts);
        CHECK(vecs.size() == 3);
        CHECK(vecs[0].size() == 64);
        CHECK(t.embed_calls() == 2);
    }
}

TEST_CASE("http transport") {
    FakeGateway gw;
    SUBCASE("retries transient statuses") {
        gw.failures = 2;
        HttpTransport t(gw.url(), "secret");
        AttemptLog log;
        CHECK(call_gateway(t, chat("translate"), log, no_sleep()) == "echo hello");
        CHECK(log.size() == 3);
        CHECK(log.records()[0].status == 503);
        CHECK(gw.last_auth == "Bearer secret");
    }
    SUBCASE("client errors are fatal") {
        gw.failures = 5;
        gw.status = 400;
        HttpTransport t(gw.url(), "");
        AttemptLog log;
        CHECK(error_of([&] { call_gateway(t, chat("translate"), log, no_sleep()); }) == Errc::GatewayError);
        CHECK(log.size() == 1);
    }
    SUBCASE("embeddings") {
        HttpTransport t(gw.url(), "");
        AttemptLog log;
        EmbedRequest req{"emb", {"a", "b"}};
        const auto vecs = call_embed(t, req, log, no_sleep());
        REQUIRE(vecs.size() == 2);
        CHECK(vecs[1][1] == 1.0);
    }
    SUBCASE("unreachable host is transient") {
        HttpTransport t("http://127.0.0.1:1", "");
        AttemptLog log;
        auto req = chat("translate", 2);
        req.timeout = std::chrono::milliseconds(500);
        CHECK(error_of([&] { call_gateway(t, req, log, no_sleep()); }) == Errc::ExhaustedRetries);
        CHECK(log.records()[0].outcome == "transient");
    }
}
