#include "dialect_eval/corpus/dialect.hpp"

#include <algorithm>
#include <cctype>

#include "dialect_eval/common/error.hpp"

namespace de::corpus {

namespace {

constexpr std::array<std::pair<Dialect, std::string_view>, 10> kLabels = {{
    {Dialect::Barishal, "Barishal"},
    {Dialect::Chittagong, "Chittagong"},
    {Dialect::Kishoreganj, "Kishoreganj"},
    {Dialect::Mymensingh, "Mymensingh"},
    {Dialect::Narail, "Narail"},
    {Dialect::Noakhali, "Noakhali"},
    {Dialect::Rangpur, "Rangpur"},
    {Dialect::Sylhet, "Sylhet"},
    {Dialect::Tangail, "Tangail"},
    {Dialect::Standard, "Standard"},
}};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(Dialect d) noexcept {
    for (const auto& [dialect, label] : kLabels) {
        if (dialect == d) return label;
    }
    return "Unknown";
}

std::optional<Dialect> try_parse_dialect(std::string_view label) {
    label = trim(label);
    for (const auto& [dialect, name] : kLabels) {
        if (iequals(label, name)) return dialect;
    }
    return std::nullopt;
}

Dialect parse_dialect(std::string_view label) {
    if (auto d = try_parse_dialect(label)) return *d;
    throw Error(Errc::InvalidDialect, "unknown dialect label '" + std::string(label) + "'");
}

}  // namespace de::corpus
