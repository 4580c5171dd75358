#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace de::judging::detail {

/// Throws MalformedJson when no object can be read.
nlohmann::json parse_verdict_object(std::string_view raw, bool strict);

const nlohmann::json& require(const nlohmann::json& obj, const char* field);
std::string require_text(const nlohmann::json& obj, const char* field, bool non_empty);

/// Integers, integral floats, and numeric strings; anything else is
/// MalformedJson. Results outside [lo, hi] raise `range_error`.
int require_int(const nlohmann::json& obj, const char* field, int lo, int hi, int range_error);

bool require_bool(const nlohmann::json& obj, const char* field);

/// Comma-separated list (commas inside parentheses do not split) or a JSON
/// array of strings. "none", "n/a", "-" and blanks mean an empty list.
std::vector<std::string> split_list(const nlohmann::json& value);

}  // namespace de::judging::detail
