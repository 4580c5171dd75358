#include "dialect_eval/common/utf8.hpp"

#include <algorithm>
#include <numeric>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace de::utf8 {

std::u32string decode(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
    if (error) {
        out += "\xEF\xBF\xBD";
        return;
    }
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size() * 3);
    for (char32_t cp : cps) append(out, cp);
    return out;
}

std::size_t length(std::string_view text) {
    return decode(text).size();
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
    const auto ua = decode(a);
    const auto ub = decode(b);
    const std::size_t longest = std::max(ua.size(), ub.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

bool is_bengali(char32_t cp) noexcept {
    return cp >= 0x0980 && cp <= 0x09FF;
}

double bengali_script_ratio(std::string_view text) {
    std::size_t letters = 0;
    std::size_t bengali = 0;
    for (char32_t cp : decode(text)) {
        const auto c = static_cast<UChar32>(cp);
        const auto type = u_charType(c);
        // Vowel signs are combining marks rather than letters.
        if (!u_isalpha(c) && type != U_NON_SPACING_MARK && type != U_COMBINING_SPACING_MARK) continue;
        ++letters;
        if (is_bengali(cp)) ++bengali;
    }
    return letters == 0 ? 0.0 : static_cast<double>(bengali) / static_cast<double>(letters);
}

}  // namespace de::utf8
