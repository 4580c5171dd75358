#include "verdict_fields.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/judging/json_extract.hpp"

namespace de::judging::detail {

using json = nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

bool is_empty_marker(const std::string& s) {
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return lower.empty() || lower == "none" || lower == "n/a" || lower == "-" || lower == "null";
}

}  // namespace

json parse_verdict_object(std::string_view raw, bool strict) {
    std::string_view body = raw;
    if (!strict) {
        auto obj = first_json_object(raw);
        if (!obj) throw Error(Errc::MalformedJson, "no JSON object in judge response");
        body = *obj;
    }
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(Errc::MalformedJson, e.what());
    }
    if (!doc.is_object()) throw Error(Errc::MalformedJson, "judge response is not a JSON object");
    return doc;
}

const json& require(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) throw Error(Errc::MissingField, field);
    return *it;
}

std::string require_text(const json& obj, const char* field, bool non_empty) {
    const json& v = require(obj, field);
    if (!v.is_string()) throw Error(Errc::MalformedJson, std::string(field) + " must be a string");
    std::string s = v.get<std::string>();
    if (non_empty && trim(s).empty()) throw Error(Errc::MissingField, std::string(field) + " is empty");
    return s;
}

int require_int(const json& obj, const char* field, int lo, int hi, int range_error) {
    const json& v = require(obj, field);
    double value;
    if (v.is_number_integer()) {
        value = static_cast<double>(v.get<long long>());
    } else if (v.is_number()) {
        value = v.get<double>();
    } else if (v.is_string()) {
        const std::string s = trim(v.get<std::string>());
        std::size_t used = 0;
        try {
            value = std::stod(s, &used);
        } catch (const std::exception&) {
            throw Error(Errc::MalformedJson, std::string(field) + " is not numeric");
        }
        if (used != s.size()) throw Error(Errc::MalformedJson, std::string(field) + " is not numeric");
    } else {
        throw Error(Errc::MalformedJson, std::string(field) + " is not numeric");
    }
    if (!std::isfinite(value) || value != std::floor(value)) {
        throw Error(Errc::MalformedJson, std::string(field) + " is not an integer");
    }
    if (value < lo || value > hi) {
        throw Error(static_cast<Errc>(range_error), std::string(field) + " = " + std::to_string(value) +
                                                        " outside [" + std::to_string(lo) + ", " +
                                                        std::to_string(hi) + "]");
    }
    return static_cast<int>(value);
}

bool require_bool(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        std::string s = trim(v.get<std::string>());
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "true" || s == "yes") return true;
        if (s == "false" || s == "no") return false;
    }
    throw Error(Errc::MalformedJson, std::string(field) + " must be a boolean");
}

std::vector<std::string> split_list(const json& value) {
    std::vector<std::string> items;
    if (value.is_array()) {
        for (const auto& e : value) {
            if (!e.is_string()) throw Error(Errc::MalformedJson, "list entries must be strings");
            auto s = trim(e.get<std::string>());
            if (!is_empty_marker(s)) items.push_back(std::move(s));
        }
        return items;
    }
    if (!value.is_string()) throw Error(Errc::MalformedJson, "expected a string or an array of strings");
    const std::string text = value.get<std::string>();
    std::string current;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')' && depth > 0) --depth;
        if (c == ',' && depth == 0) {
            auto s = trim(current);
            if (!is_empty_marker(s)) items.push_back(std::move(s));
            current.clear();
            continue;
        }
        current.push_back(c);
    }
    auto s = trim(current);
    if (!is_empty_marker(s)) items.push_back(std::move(s));
    return items;
}

}  // namespace de::judging::detail
