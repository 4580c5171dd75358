#include <doctest.h>

#include <nlohmann/json.hpp>

#include "dialect_eval/judging/mock_gateway.hpp"
#include "dialect_eval/metrics/textmetrics.hpp"
#include "dialect_eval/pipeline/scoring.hpp"
#include "dialect_eval/retrieval/embedder.hpp"
#include "support/helpers.hpp"

using namespace de::pipeline;
using de::Errc;
using testing::error_of;

TEST_CASE("score items") {
    const auto items = load_score_items(testing::data_dir / "toy" / "score_items.jsonl");
    REQUIRE(items.size() == 6);

    SUBCASE("lexical metrics only") {
        const auto rows = score_items(items, {});
        CHECK(rows[0]["metrics"]["BLEU"]["raw"] == 100.0);
        CHECK(rows[0]["metrics"]["WER"]["raw"] == 0.0);
        CHECK_FALSE(rows[0]["metrics"].contains("BertF1"));
        CHECK(rows[2]["metrics"]["ChrF"]["raw"].get<double>() ==
              doctest::Approx(de::metrics::chrf(items[2].hypothesis, items[2].reference)));
        CHECK(metric_correlations(rows, items).size() == 3);
    }
    SUBCASE("with embeddings and the translation judge") {
        de::retrieval::HashEmbedder embedder(32);
        de::judging::MockTransport transport;
        de::judging::AttemptLog attempts;
        ScoreOptions opts{&embedder, &transport, &attempts, "judge-t", 2};
        const auto rows = score_items(items, opts);
        CHECK(rows[0]["metrics"]["BertF1"]["raw"].get<double>() == doctest::Approx(1.0));
        CHECK(rows[0]["metrics"]["CosineSim"]["normalized"].get<double>() == doctest::Approx(1.0));
        for (const auto& r : rows) {
            CHECK(r.contains("translation_verdict"));
            CHECK(r["ceiling_flags"].empty());
        }
        CHECK(attempts.size() == 6);
        CHECK(metric_correlations(rows, items).size() == 5);
    }
    SUBCASE("correlations need human scores") {
        auto partial = items;
        partial[1].human.reset();
        CHECK(error_of([&] { metric_correlations(score_items(partial, {}), partial); }) == Errc::InvalidSeries);
    }
}
