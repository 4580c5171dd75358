#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace de::corpus {

/// Result of normalizing a raw string.
///
/// `display` is NFC-composed with whitespace collapsed and trimmed, keeping
/// the original digit glyphs. `key` is `display` with Bengali digits mapped to
/// ASCII and is what lexical matching operates on.
struct NormalizedText {
    std::string display;
    std::string key;

    bool operator==(const NormalizedText&) const = default;
};

NormalizedText normalize_text(std::string_view raw);

/// Whitespace split. Interior punctuation stays attached to its token.
std::vector<std::string> tokenize(std::string_view normalized);

inline constexpr std::size_t kShortQueryTokens = 4;
inline constexpr std::string_view kShortTag = "[[SHORT]]";

struct TaggedQuery {
    std::string original;
    std::string normalized;  // matching key
    std::vector<std::string> tokens;
    bool is_short = false;

    /// The normalized query with the short tag appended when applicable.
    std::string tagged_text() const;
};

/// Throws EmptyQuery when nothing survives normalization.
TaggedQuery tag_query(std::string_view raw);

}  // namespace de::corpus
