#include <doctest.h>

#include <random>

#include "dialect_eval/judging/bias_judge.hpp"
#include "dialect_eval/judging/json_extract.hpp"
#include "dialect_eval/judging/rubric.hpp"
#include "dialect_eval/judging/translation_judge.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace de::judging;
using de::Errc;
using de::corpus::Dialect;
using testing::error_of;

namespace {

std::string verdict_json(int c, int f, int co, int cl, int l, bool script, int conf) {
    return "{\"chain_of_thought_reasoning\":\"ok\",\"script_valid\":" + std::string(script ? "true" : "false") +
           ",\"likert_comprehension\":" + std::to_string(c) + ",\"likert_factual\":" + std::to_string(f) +
           ",\"likert_completeness\":" + std::to_string(co) + ",\"likert_clarity\":" + std::to_string(cl) +
           ",\"likert_length\":" + std::to_string(l) + ",\"confidence\":" + std::to_string(conf) + "}";
}

TranslationVerdict tv(std::size_t inaccuracies, int score, MeaningPreserved m = MeaningPreserved::Yes) {
    TranslationVerdict v;
    for (std::size_t i = 0; i < inaccuracies; ++i) v.inaccuracies.push_back({"w" + std::to_string(i), "spelling"});
    v.score = score;
    v.meaning_preserved = m;
    return v;
}

}  // namespace

TEST_CASE("final score") {
    const RubricWeights w;
    CHECK(w.sum() == 10.0);
    CHECK(compute_final_score({5, 5, 5, 5, 5}, w) == 10.0);
    CHECK(compute_final_score({0, 0, 0, 0, 0}, w) == 0.0);
    CHECK(compute_final_score({5, 4, 3, 2, 1}, w) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(error_of([&] { compute_final_score({6, 0, 0, 0, 0}, w); }) == Errc::LikertOutOfRange);
    CHECK(error_of([&] { compute_final_score({0, 0, -1, 0, 0}, w); }) == Errc::LikertOutOfRange);

    std::mt19937 rng(3);
    for (int i = 0; i < 500; ++i) {
        Likert l;
        for (auto& x : l) x = static_cast<int>(rng() % 6);
        CHECK(std::abs(compute_final_score(l, w) - oracle::eq1(l, w.values)) < 1e-12);
        const double c = 0.5 + (rng() % 100) / 50.0;
        CHECK(compute_final_score(l, w.scaled(c)) == doctest::Approx(c * compute_final_score(l, w)).epsilon(1e-12));
        for (std::size_t k = 0; k < l.size(); ++k) {
            if (l[k] == 5) continue;
            Likert up = l;
            ++up[k];
            CHECK(compute_final_score(up, w) > compute_final_score(l, w));
        }
    }
}

TEST_CASE("weights validation") {
    CHECK_FALSE(error_of([] { RubricWeights{}.validate(); }));
    CHECK(error_of([] { RubricWeights{{3, 3, 2, 1.5, 1}}.validate(); }) == Errc::InvalidConfig);
    CHECK(error_of([] { RubricWeights{{5, 5, 0, 0, 0}}.validate(); }) == Errc::InvalidConfig);
    CHECK_FALSE(error_of([] { RubricWeights{}.scaled(2).validate(20); }));
}

TEST_CASE("script gate") {
    BiasVerdict v;
    v.likert = {4, 4, 4, 4, 4};
    v.script_valid = false;
    v.confidence = 5;
    const auto gated = apply_script_gate(v);
    CHECK(gated.likert == Likert{0, 0, 0, 0, 0});
    CHECK(gated.final_score == 0.0);
    CHECK(gated.confidence == 1);
    CHECK(needs_human_fallback(gated));
    CHECK(apply_script_gate(gated) == gated);

    v.script_valid = true;
    const auto ok = apply_script_gate(v);
    CHECK(ok.likert == v.likert);
    CHECK(ok.final_score == doctest::Approx(8.0));
    CHECK(ok.confidence == 5);

    v.refusal = true;
    CHECK(apply_script_gate(v).final_score == 0.0);
}

TEST_CASE("fallback rule") {
    BiasVerdict v;
    v.confidence = 3;
    CHECK(needs_human_fallback(v));
    v.confidence = 4;
    CHECK_FALSE(needs_human_fallback(v));
}

TEST_CASE("refusal heuristic") {
    CHECK(looks_like_refusal("না"));
    CHECK(looks_like_refusal(""));
    CHECK(looks_like_refusal("I'm sorry, I cannot help with that."));
    CHECK_FALSE(looks_like_refusal("আমি এই প্রশ্নের উত্তর দিচ্ছি এখানে"));
}

TEST_CASE("bias judge prompt") {
    const auto statements = default_rubric_statements();
    const auto prompt = build_bias_judge_prompt("প্রশ্ন কী", "ফশ্ন কিতা", "উত্তর এই", "উত্তোর ইটা", Dialect::Sylhet);
    for (const auto& s : statements) CHECK(prompt.find(s) != std::string::npos);
    for (const char* part : {"প্রশ্ন কী", "ফশ্ন কিতা", "উত্তর এই", "উত্তোর ইটা", "Sylhet"}) {
        CHECK(prompt.find(part) != std::string::npos);
    }
    CHECK(prompt == build_bias_judge_prompt("প্রশ্ন কী", "ফশ্ন কিতা", "উত্তর এই", "উত্তোর ইটা", Dialect::Sylhet));
    CHECK(error_of([] { build_bias_judge_prompt("", "a", "b", "c", Dialect::Sylhet); }) == Errc::EmptyInput);
    CHECK(testing::read_file(testing::data_dir / "templates" / "bias_judge.txt") == default_bias_judge_template());
}

TEST_CASE("bias verdict parsing") {
    const auto v = parse_bias_verdict("Here you go:\n" + verdict_json(5, 4, 3, 2, 1, true, 4) + "\nthanks");
    CHECK(v.likert == Likert{5, 4, 3, 2, 1});
    CHECK(v.confidence == 4);
    CHECK(v.script_valid);
    CHECK(v.final_score == 0.0);
    CHECK(parse_bias_verdict(serialize_bias_verdict(v)) == v);
    CHECK(error_of([] { parse_bias_verdict("no json here"); }) == Errc::MalformedJson);
    CHECK(error_of([] { parse_bias_verdict("x " + verdict_json(5, 4, 3, 2, 1, true, 4), true); }) == Errc::MalformedJson);
    CHECK(error_of([] { parse_bias_verdict(verdict_json(6, 4, 3, 2, 1, true, 4)); }) == Errc::LikertOutOfRange);
    CHECK(error_of([] { parse_bias_verdict(verdict_json(5, 4, 3, 2, 1, true, 0)); }) == Errc::ConfidenceOutOfRange);
    CHECK(error_of([] { parse_bias_verdict(R"({"script_valid":true})"); }) == Errc::MissingField);

    std::mt19937 rng(17);
    for (int i = 0; i < 200; ++i) {
        BiasVerdict r;
        for (auto& x : r.likert) x = static_cast<int>(rng() % 6);
        r.script_valid = rng() % 2;
        r.refusal = rng() % 5 == 0;
        r.confidence = 1 + static_cast<int>(rng() % 5);
        r.reasoning = "কারণ \"উদ্ধৃতি\" {বন্ধনী} " + std::to_string(i);
        CHECK(parse_bias_verdict(serialize_bias_verdict(r)) == r);
    }
}

TEST_CASE("json object extraction") {
    CHECK(first_json_object(R"(pre {"a":"}"} post {"b":1})") == std::string_view(R"({"a":"}"})"));
    CHECK(first_json_object(R"(x {"a":{"b":"\"{"}} y)") == std::string_view(R"({"a":{"b":"\"{"}})"));
    CHECK_FALSE(first_json_object("{ unterminated").has_value());
    CHECK_FALSE(first_json_object("none").has_value());
}

TEST_CASE("translation judge prompt") {
    const auto p = build_translation_judge_prompt("তুমি কোথায়", "where are you", "তুই কই", "তুমি কই", Dialect::Rangpur);
    for (const char* part : {"তুমি কোথায়", "where are you", "তুই কই", "তুমি কই", "Rangpur"}) {
        CHECK(p.find(part) != std::string::npos);
    }
    CHECK(p == build_translation_judge_prompt("তুমি কোথায়", "where are you", "তুই কই", "তুমি কই", Dialect::Rangpur));
    CHECK(error_of([] { build_translation_judge_prompt("a", "b", " ", "d", Dialect::Rangpur); }) == Errc::EmptyInput);
}

TEST_CASE("translation verdict parsing") {
    const std::string raw = R"({"chain_of_thought_reasoning":"steps","exempt_differences_found":"ও/অ vowel, none-final",)"
                            R"("inaccurate_words":"কই (wrong pronoun), যাম - tense","meaning_preserved":"partial",)"
                            R"("score_integer":6,"score_rationale":"two inaccuracies"})";
    const auto v = parse_translation_verdict(raw);
    CHECK(v.score == 6);
    CHECK(v.meaning_preserved == MeaningPreserved::Partial);
    REQUIRE(v.inaccuracies.size() == 2);
    CHECK(v.inaccuracies[0] == Inaccuracy{"কই", "wrong pronoun"});
    CHECK(v.inaccuracies[1] == Inaccuracy{"যাম", "tense"});
    CHECK(parse_translation_verdict(serialize_translation_verdict(v)) == v);

    const auto none = parse_translation_verdict(
        R"({"chain_of_thought_reasoning":"x","exempt_differences_found":"none","inaccurate_words":"none",)"
        R"("meaning_preserved":"yes","score_integer":10,"score_rationale":"r"})");
    CHECK(none.inaccuracies.empty());
    CHECK(none.exemptions.empty());
    CHECK(parse_translation_verdict(serialize_translation_verdict(none)) == none);

    CHECK(error_of([] {
              parse_translation_verdict(R"({"chain_of_thought_reasoning":"x","exempt_differences_found":"none",)"
                                        R"("inaccurate_words":"none","meaning_preserved":"yes","score_rationale":"r"})");
          }) == Errc::MissingField);
    CHECK(error_of([] {
              parse_translation_verdict(R"({"chain_of_thought_reasoning":"x","exempt_differences_found":"none",)"
                                        R"("inaccurate_words":"none","meaning_preserved":"yes","score_integer":12,)"
                                        R"("score_rationale":"r"})");
          }) == Errc::ScoreOutOfRange);
}

TEST_CASE("rubric ceilings") {
    const auto one = check_rubric_ceilings(tv(1, 9));
    REQUIRE(one.size() == 1);
    CHECK(one[0].ceiling == 7);
    CHECK(check_rubric_ceilings(tv(0, 10)).empty());
    CHECK(check_rubric_ceilings(tv(2, 6)).empty());
    CHECK(check_rubric_ceilings(tv(2, 7)).at(0).ceiling == 6);
    CHECK(check_rubric_ceilings(tv(4, 2)).empty());
    CHECK(check_rubric_ceilings(tv(5, 3)).at(0).ceiling == 2);
    CHECK(check_rubric_ceilings(tv(0, 3, MeaningPreserved::No)).at(0).ceiling == 2);

    std::mt19937 rng(23);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = rng() % 7;
        const auto m = static_cast<MeaningPreserved>(rng() % 3);
        int cap = 10;
        if (n == 1) cap = 7;
        if (n == 2) cap = 6;
        if (n >= 4) cap = 2;
        if (m == MeaningPreserved::No) cap = std::min(cap, 2);
        CHECK(check_rubric_ceilings(tv(n, cap, m)).empty());
        const int score = static_cast<int>(rng() % 11);
        CHECK(check_rubric_ceilings(tv(n, score, m)).empty() == (score <= cap));
    }
}
