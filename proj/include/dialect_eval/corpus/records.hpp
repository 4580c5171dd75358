#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dialect_eval/corpus/dialect.hpp"

namespace de::corpus {

struct SentencePair {
    std::string id;
    std::string standard;
    std::string dialect;
    Dialect district = Dialect::Barishal;
    std::string source_tag;

    bool operator==(const SentencePair&) const = default;
};

enum class QuestionType { Definitional, Contrasting, FactualIdentification, Functional };

enum class Domain { Technology, SocialSciences, HealthSports, PhysNatSciences, ArtsHumanities, BusinessEconomics };

std::string_view to_string(QuestionType t) noexcept;
std::string_view to_string(Domain d) noexcept;
std::optional<QuestionType> try_parse_question_type(std::string_view s);
std::optional<Domain> try_parse_domain(std::string_view s);

struct QuestionSet {
    std::string id;
    QuestionType qtype = QuestionType::Definitional;
    Domain domain = Domain::Technology;
    std::string standard_q;
    std::map<Dialect, std::string> variants;

    bool operator==(const QuestionSet&) const = default;
};

}  // namespace de::corpus
