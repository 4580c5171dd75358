#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "dialect_eval/pipeline/review.hpp"
#include "dialect_eval/pipeline/verdicts.hpp"
#include "support/helpers.hpp"

using namespace de::pipeline;
using de::corpus::Dialect;
using nlohmann::json;

namespace {

std::filesystem::path make_queue(const testing::TempDir& dir, std::size_t n) {
    std::vector<FallbackItem> items;
    for (std::size_t i = 0; i < n; ++i) {
        FallbackItem item;
        item.verdict_ref = "v-" + std::to_string(1000 + i);
        item.question_id = "q" + std::to_string(i);
        item.dialect = Dialect::Sylhet;
        item.model_name = "m";
        item.payload.standard_question = "প্রশ্ন";
        item.payload.dialect_question = "ফশ্ন";
        item.machine.confidence = 2;
        items.push_back(item);
    }
    const auto path = dir.path() / "fallback.jsonl";
    save_fallback_queue(path, items);
    return path;
}

std::string override_body(const std::string& ref, const std::string& likert, bool script_valid = true) {
    return R"({"verdict_ref":")" + ref + R"(","likert":)" + likert + R"(,"script_valid":)" +
           (script_valid ? "true" : "false") + R"(,"note":"checked"})";
}

}  // namespace

TEST_CASE("review service") {
    testing::TempDir dir;
    const auto path = make_queue(dir, 3);
    ReviewService svc(path);

    CHECK(svc.queue("pending").body["items"].size() == 3);
    CHECK(svc.queue("resolved").body["items"].empty());
    CHECK(svc.queue("weird").status == 400);
    CHECK(svc.item("v-1001").body["question_id"] == "q1");
    CHECK(svc.item("v-9").status == 404);

    CHECK(svc.submit("{not json").status == 400);
    CHECK(svc.submit(override_body("v-1000", "[7,1,1,1,1]")).status == 422);
    CHECK(svc.submit(override_body("v-1000", "[1,1,1,1]")).status == 422);
    CHECK(svc.submit(R"({"verdict_ref":"v-1000","likert":[1,1,1,1,1],"script_valid":"yes"})").status == 422);
    CHECK(svc.submit(R"({"likert":[1,1,1,1,1]})").status == 422);
    CHECK(svc.submit(override_body("v-9", "[1,1,1,1,1]")).status == 404);

    const auto ok = svc.submit(override_body("v-1000", "[5,4,3,2,1]"));
    CHECK(ok.status == 200);
    CHECK(ok.body["status"] == "resolved");
    CHECK(ok.body["human_override"]["final_score"].get<double>() == doctest::Approx(7.0));
    const auto gated = svc.submit(override_body("v-1001", "[5,5,5,5,5]", false));
    CHECK(gated.body["human_override"]["final_score"] == 0.0);

    const auto progress = svc.progress().body;
    CHECK(progress["total"] == 3);
    CHECK(progress["pending"] == 1);
    CHECK(progress["resolved"] == 2);
    CHECK(svc.weights().body["scale_max"] == 10.0);

    // persisted atomically, readable by a fresh service
    const auto reloaded = load_fallback_queue(path);
    REQUIRE(reloaded[0].human_override.has_value());
    CHECK(reloaded[0].human_override->final_score == doctest::Approx(7.0));
    CHECK(reloaded[0].note == "checked");
    CHECK(ReviewService(path).queue("pending").body["items"].size() == 1);
}

TEST_CASE("review service on an empty queue") {
    testing::TempDir dir;
    ReviewService svc(make_queue(dir, 0));
    CHECK(svc.queue("pending").body["items"].empty());
    CHECK(svc.progress().body["total"] == 0);
}

TEST_CASE("review http server") {
    testing::TempDir dir;
    ReviewService svc(make_queue(dir, 3));
    ReviewServer server(svc, {"127.0.0.1", 0, "tok"});
    const int port = server.bind();
    std::thread th([&] { server.listen(); });

    httplib::Client cli("127.0.0.1", port);
    cli.set_connection_timeout(2);
    CHECK(cli.Get("/api/progress")->status == 401);
    const httplib::Headers auth{{"Authorization", "Bearer tok"}};

    auto pending = cli.Get("/api/queue?status=pending", auth);
    REQUIRE(pending);
    CHECK(pending->status == 200);
    CHECK(json::parse(pending->body)["items"].size() == 3);
    CHECK(cli.Get("/api/item/v-1002", auth)->status == 200);
    CHECK(cli.Get("/api/item/v-77", auth)->status == 404);

    auto bad = cli.Post("/api/verdict", auth, override_body("v-1002", "[7,5,5,5,5]"), "application/json");
    CHECK(bad->status == 422);
    auto good = cli.Post("/api/verdict", auth, override_body("v-1002", "[5,4,3,2,1]"), "application/json");
    REQUIRE(good);
    CHECK(good->status == 200);
    CHECK(json::parse(cli.Get("/api/progress", auth)->body)["resolved"] == 1);
    CHECK(json::parse(cli.Get("/api/weights", auth)->body)["order"].size() == 5);

    // concurrent readers and writers
    std::vector<std::thread> clients;
    std::atomic<int> failures{0};
    for (int t = 0; t < 4; ++t) {
        clients.emplace_back([&, t] {
            httplib::Client c("127.0.0.1", port);
            for (int i = 0; i < 10; ++i) {
                auto r = (t % 2) ? c.Get("/api/queue", auth)
                                 : c.Post("/api/verdict", auth, override_body("v-1000", "[3,3,3,3,3]"), "application/json");
                if (!r || r->status != 200) ++failures;
            }
        });
    }
    for (auto& c : clients) c.join();
    CHECK(failures == 0);

    server.stop();
    th.join();
}
