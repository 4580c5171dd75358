#include "dialect_eval/corpus/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/utf8.hpp"

namespace de::corpus {

namespace {

std::string nfc(std::string_view raw) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error(Errc::Io, "ICU NFC normalizer unavailable");
    const auto input = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    icu::UnicodeString composed = normalizer->normalize(input, status);
    if (U_FAILURE(status)) throw Error(Errc::Io, "NFC normalization failed");
    std::string out;
    composed.toUTF8String(out);
    return out;
}

constexpr char32_t kBengaliZero = 0x09E6;
constexpr char32_t kBengaliNine = 0x09EF;

}  // namespace

NormalizedText normalize_text(std::string_view raw) {
    const std::u32string composed = utf8::decode(nfc(raw));

    NormalizedText out;
    out.display.reserve(raw.size());
    out.key.reserve(raw.size());
    bool pending_space = false;
    for (char32_t cp : composed) {
        if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
            pending_space = !out.display.empty();
            continue;
        }
        if (pending_space) {
            out.display.push_back(' ');
            out.key.push_back(' ');
            pending_space = false;
        }
        utf8::append(out.display, cp);
        if (cp >= kBengaliZero && cp <= kBengaliNine) {
            out.key.push_back(static_cast<char>('0' + (cp - kBengaliZero)));
        } else {
            utf8::append(out.key, cp);
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
    std::vector<std::string> tokens;
    std::string current;
    for (char32_t cp : utf8::decode(normalized)) {
        if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            utf8::append(current, cp);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string TaggedQuery::tagged_text() const {
    if (!is_short) return normalized;
    return normalized + " " + std::string(kShortTag);
}

TaggedQuery tag_query(std::string_view raw) {
    TaggedQuery q;
    q.original = std::string(raw);
    q.normalized = normalize_text(raw).key;
    if (q.normalized.empty()) throw Error(Errc::EmptyQuery, "query is empty after normalization");
    q.tokens = tokenize(q.normalized);
    q.is_short = q.tokens.size() < kShortQueryTokens;
    return q;
}

}  // namespace de::corpus
