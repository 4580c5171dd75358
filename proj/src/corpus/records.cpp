#include "dialect_eval/corpus/records.hpp"

#include <array>
#include <utility>

namespace de::corpus {

namespace {

constexpr std::array<std::pair<QuestionType, std::string_view>, 4> kTypes = {{
    {QuestionType::Definitional, "Definitional"},
    {QuestionType::Contrasting, "Contrasting"},
    {QuestionType::FactualIdentification, "FactualIdentification"},
    {QuestionType::Functional, "Functional"},
}};

constexpr std::array<std::pair<Domain, std::string_view>, 6> kDomains = {{
    {Domain::Technology, "Technology"},
    {Domain::SocialSciences, "SocialSciences"},
    {Domain::HealthSports, "HealthSports"},
    {Domain::PhysNatSciences, "PhysNatSciences"},
    {Domain::ArtsHumanities, "ArtsHumanities"},
    {Domain::BusinessEconomics, "BusinessEconomics"},
}};

template <typename E, std::size_t N>
std::string_view label_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "Unknown";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s) {
    for (const auto& [e, name] : table) {
        if (name == s) return e;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(QuestionType t) noexcept { return label_of(kTypes, t); }
std::string_view to_string(Domain d) noexcept { return label_of(kDomains, d); }
std::optional<QuestionType> try_parse_question_type(std::string_view s) { return value_of(kTypes, s); }
std::optional<Domain> try_parse_domain(std::string_view s) { return value_of(kDomains, s); }

}  // namespace de::corpus
