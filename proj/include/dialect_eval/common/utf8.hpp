#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace de::utf8 {

/// Decodes UTF-8 into code points; malformed sequences become U+FFFD.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

std::size_t length(std::string_view text);

/// Levenshtein distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// 1 - lev(a, b) / max(|a|, |b|); 1.0 when both are empty.
double levenshtein_similarity(std::string_view a, std::string_view b);

bool is_bengali(char32_t cp) noexcept;

/// Fraction of letter code points in the Bengali block. 0 when the text has
/// no letters.
double bengali_script_ratio(std::string_view text);

}  // namespace de::utf8
