#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace de::corpus {

enum class Dialect {
    Barishal,
    Chittagong,
    Kishoreganj,
    Mymensingh,
    Narail,
    Noakhali,
    Rangpur,
    Sylhet,
    Tangail,
    Standard,
};

inline constexpr std::array<Dialect, 9> kRegionalDialects = {
    Dialect::Barishal, Dialect::Chittagong, Dialect::Kishoreganj, Dialect::Mymensingh, Dialect::Narail,
    Dialect::Noakhali, Dialect::Rangpur,    Dialect::Sylhet,      Dialect::Tangail,
};

/// Canonical-cased label ("Chittagong").
std::string_view to_string(Dialect d) noexcept;

/// Case-insensitive lookup; surrounding whitespace ignored.
std::optional<Dialect> try_parse_dialect(std::string_view label);

/// Throws InvalidDialect for labels outside the closed set.
Dialect parse_dialect(std::string_view label);

}  // namespace de::corpus
