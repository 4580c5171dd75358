#include <doctest.h>

#include <sstream>

#include "dialect_eval/corpus/dialect.hpp"
#include "dialect_eval/corpus/io.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "support/helpers.hpp"

using namespace de::corpus;
using de::Errc;
using testing::error_of;

TEST_CASE("normalize_text examples") {
    const auto digits = normalize_text("৬৪");
    CHECK(digits.key == "64");
    CHECK(digits.display == "৬৪");
    CHECK(normalize_text("abc").display == "abc");
    CHECK(normalize_text("  ক   খ \n").display == "ক খ");
    CHECK(normalize_text("").display.empty());
}

TEST_CASE("normalize_text composes to NFC") {
    // e + combining acute, and Bengali o-kar written as its two parts.
    CHECK(normalize_text("e\xCC\x81").display == "\xC3\xA9");
    CHECK(normalize_text("কো").display == "কো");
}

TEST_CASE("normalize_text is idempotent") {
    for (const std::string s : {"  আমি\t\tভাত ৫টা  ", "e\xCC\x81 x", "", "ভালালাগেনা", "  ক খ "}) {
        const auto once = normalize_text(s);
        CHECK(normalize_text(once.display).display == once.display);
        CHECK(normalize_text(once.key).key == once.key);
    }
}

TEST_CASE("tokenize") {
    CHECK(tokenize("ক খ গ") == std::vector<std::string>{"ক", "খ", "গ"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("ভালালাগেনা") == std::vector<std::string>{"ভালালাগেনা"});
    CHECK(tokenize("a, b.") == std::vector<std::string>{"a,", "b."});
}

TEST_CASE("tag_query short boundary") {
    const auto three = tag_query("আমি ভাত খাই");
    CHECK(three.is_short);
    CHECK(three.tagged_text() == "আমি ভাত খাই [[SHORT]]");
    const auto four = tag_query("আমি সকালে ভাত খাই");
    CHECK_FALSE(four.is_short);
    CHECK(four.tagged_text() == "আমি সকালে ভাত খাই");
    CHECK(tag_query("  raw  ").original == "  raw  ");
    CHECK(tag_query("৬৪ টাকা").normalized == "64 টাকা");
    CHECK(error_of([] { tag_query("   "); }) == Errc::EmptyQuery);
}

TEST_CASE("dialect labels") {
    CHECK(parse_dialect("sylhet") == Dialect::Sylhet);
    CHECK(parse_dialect("  CHITTAGONG ") == Dialect::Chittagong);
    CHECK(to_string(Dialect::Noakhali) == "Noakhali");
    CHECK_FALSE(try_parse_dialect("Dhaka").has_value());
    CHECK(error_of([] { parse_dialect("Dhaka"); }) == Errc::InvalidDialect);
    CHECK(kRegionalDialects.size() == 9);
}

namespace {

std::string pair_line(const std::string& id, const std::string& district, const std::string& standard = "আমি ভাত খাই") {
    return R"({"id":")" + id + R"(","standard":")" + standard + R"(","dialect":"আঁই ভাত খাইয়ুম","district":")" +
           district + R"(","source_tag":"t"})" + "\n";
}

}  // namespace

TEST_CASE("read_pairs validation") {
    std::istringstream ok(pair_line("a", "Sylhet") + "\n" + pair_line("b", "rangpur") + pair_line("c", "Tangail"));
    const auto pairs = read_pairs(ok);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[1].district == Dialect::Rangpur);

    std::istringstream standard(pair_line("a", "standard"));
    CHECK(error_of([&] { read_pairs(standard); }) == Errc::InvalidDialect);

    std::istringstream dup(pair_line("a", "Sylhet") + pair_line("a", "Narail"));
    try {
        read_pairs(dup);
        FAIL("expected DuplicateId");
    } catch (const de::Error& e) {
        CHECK(e.code() == Errc::DuplicateId);
        CHECK(e.line() == 2u);
    }

    std::istringstream blank(pair_line("a", "Sylhet", "   "));
    CHECK(error_of([&] { read_pairs(blank); }) == Errc::EmptyField);

    std::istringstream broken("{not json}\n");
    CHECK(error_of([&] { read_pairs(broken); }) == Errc::ParseError);

    std::istringstream bom("\xEF\xBB\xBF" + pair_line("a", "Sylhet"));
    CHECK(error_of([&] { read_pairs(bom); }) == Errc::ParseError);
}

TEST_CASE("pairs round trip through both formats") {
    std::istringstream in(pair_line("a", "Sylhet") + pair_line("b", "Barishal", "৬৪ টাকা  দাম"));
    const auto pairs = read_pairs(in);
    CHECK(pairs[1].standard == "৬৪ টাকা দাম");
    for (auto fmt : {PairFormat::Jsonl, PairFormat::Tsv}) {
        std::stringstream buf;
        write_pairs(buf, pairs, fmt);
        CHECK(read_pairs(buf, fmt) == pairs);
    }
}

TEST_CASE("questions load and round trip") {
    std::istringstream in(
        R"({"id":"q1","qtype":"Contrasting","domain":"Technology","standard_q":"X আর Y এর পার্থক্য কী?","variants":{"sylhet":"X আর Y র ফারাক কিতা?"}})"
        "\n");
    const auto qs = read_questions(in);
    REQUIRE(qs.size() == 1);
    CHECK(qs[0].qtype == QuestionType::Contrasting);
    CHECK(qs[0].variants.at(Dialect::Sylhet) == "X আর Y র ফারাক কিতা?");
    std::stringstream buf;
    write_questions(buf, qs);
    CHECK(read_questions(buf) == qs);

    std::istringstream bad_type(R"({"id":"q1","qtype":"Essay","domain":"Technology","standard_q":"x"})");
    CHECK(error_of([&] { read_questions(bad_type); }) == Errc::ParseError);
}

TEST_CASE("bundled toy corpus loads") {
    const auto pairs = load_pairs(testing::data_dir / "toy" / "pairs.jsonl");
    CHECK(pairs.size() == 50);
    const auto qs = load_questions(testing::data_dir / "toy" / "questions.jsonl");
    CHECK(qs.size() == 5);
}
