#pragma once

#include <optional>
#include <string_view>

namespace de::judging {

/// Locates the first balanced {...} in free text, respecting JSON string
/// literals. Returns a view into `text`.
std::optional<std::string_view> first_json_object(std::string_view text);

}  // namespace de::judging
