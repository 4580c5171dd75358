#include "dialect_eval/corpus/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/corpus/text.hpp"

namespace de::corpus {

using json = nlohmann::json;

namespace {

constexpr std::string_view kBom = "\xEF\xBB\xBF";

std::string required_string(const json& obj, const char* field, std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end()) throw Error(Errc::ParseError, std::string("missing field '") + field + "'", line);
    if (!it->is_string()) throw Error(Errc::ParseError, std::string("field '") + field + "' is not a string", line);
    return it->get<std::string>();
}

std::string normalized_nonempty(const std::string& raw, const char* field, std::size_t line) {
    std::string display = normalize_text(raw).display;
    if (display.empty()) throw Error(Errc::EmptyField, std::string("field '") + field + "' is empty", line);
    return display;
}

Dialect regional_dialect(const std::string& label, std::size_t line) {
    auto d = try_parse_dialect(label);
    if (!d) throw Error(Errc::InvalidDialect, "unknown district '" + label + "'", line);
    if (*d == Dialect::Standard) throw Error(Errc::InvalidDialect, "district cannot be Standard", line);
    return *d;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.starts_with(kBom)) {
            throw Error(Errc::ParseError, "byte-order mark not allowed", lineno);
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        fn(line, lineno);
    }
}

json parse_object(const std::string& line, std::size_t lineno) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ParseError, e.what(), lineno);
    }
    if (!obj.is_object()) throw Error(Errc::ParseError, "record is not a JSON object", lineno);
    return obj;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    return in;
}

}  // namespace

std::vector<SentencePair> read_pairs(std::istream& in, PairFormat format) {
    std::vector<SentencePair> pairs;
    std::set<std::string> seen;
    for_each_line(in, [&](const std::string& line, std::size_t lineno) {
        SentencePair p;
        std::string district;
        if (format == PairFormat::Jsonl) {
            const json obj = parse_object(line, lineno);
            p.id = required_string(obj, "id", lineno);
            p.standard = required_string(obj, "standard", lineno);
            p.dialect = required_string(obj, "dialect", lineno);
            district = required_string(obj, "district", lineno);
            if (auto it = obj.find("source_tag"); it != obj.end() && it->is_string()) p.source_tag = *it;
        } else {
            auto fields = split_tabs(line);
            if (fields.size() < 4 || fields.size() > 5) {
                throw Error(Errc::ParseError, "expected 4 or 5 tab-separated fields", lineno);
            }
            p.id = fields[0];
            p.standard = fields[1];
            p.dialect = fields[2];
            district = fields[3];
            if (fields.size() == 5) p.source_tag = fields[4];
        }
        p.id = normalize_text(p.id).display;
        if (p.id.empty()) throw Error(Errc::EmptyField, "field 'id' is empty", lineno);
        p.standard = normalized_nonempty(p.standard, "standard", lineno);
        p.dialect = normalized_nonempty(p.dialect, "dialect", lineno);
        p.district = regional_dialect(district, lineno);
        if (!seen.insert(p.id).second) throw Error(Errc::DuplicateId, "duplicate id '" + p.id + "'", lineno);
        pairs.push_back(std::move(p));
    });
    return pairs;
}

std::vector<SentencePair> load_pairs(const std::filesystem::path& path, PairFormat format) {
    auto in = open_in(path);
    return read_pairs(in, format);
}

void write_pairs(std::ostream& out, const std::vector<SentencePair>& pairs, PairFormat format) {
    for (const auto& p : pairs) {
        if (format == PairFormat::Jsonl) {
            json obj = {{"id", p.id},
                        {"standard", p.standard},
                        {"dialect", p.dialect},
                        {"district", std::string(to_string(p.district))},
                        {"source_tag", p.source_tag}};
            out << obj.dump() << '\n';
        } else {
            out << p.id << '\t' << p.standard << '\t' << p.dialect << '\t' << to_string(p.district) << '\t'
                << p.source_tag << '\n';
        }
    }
}

void save_pairs(const std::filesystem::path& path, const std::vector<SentencePair>& pairs, PairFormat format) {
    auto out = open_out(path);
    write_pairs(out, pairs, format);
}

std::vector<QuestionSet> read_questions(std::istream& in) {
    std::vector<QuestionSet> questions;
    std::set<std::string> seen;
    for_each_line(in, [&](const std::string& line, std::size_t lineno) {
        const json obj = parse_object(line, lineno);
        QuestionSet q;
        q.id = normalize_text(required_string(obj, "id", lineno)).display;
        if (q.id.empty()) throw Error(Errc::EmptyField, "field 'id' is empty", lineno);
        const auto qtype = required_string(obj, "qtype", lineno);
        const auto domain = required_string(obj, "domain", lineno);
        auto t = try_parse_question_type(qtype);
        if (!t) throw Error(Errc::ParseError, "unknown qtype '" + qtype + "'", lineno);
        auto d = try_parse_domain(domain);
        if (!d) throw Error(Errc::ParseError, "unknown domain '" + domain + "'", lineno);
        q.qtype = *t;
        q.domain = *d;
        q.standard_q = normalized_nonempty(required_string(obj, "standard_q", lineno), "standard_q", lineno);
        if (auto it = obj.find("variants"); it != obj.end()) {
            if (!it->is_object()) throw Error(Errc::ParseError, "variants must be an object", lineno);
            for (const auto& [label, text] : it->items()) {
                auto dialect = try_parse_dialect(label);
                if (!dialect) throw Error(Errc::InvalidDialect, "unknown variant dialect '" + label + "'", lineno);
                if (!text.is_string()) throw Error(Errc::ParseError, "variant text must be a string", lineno);
                q.variants[*dialect] = normalized_nonempty(text.get<std::string>(), "variants", lineno);
            }
        }
        if (!seen.insert(q.id).second) throw Error(Errc::DuplicateId, "duplicate id '" + q.id + "'", lineno);
        questions.push_back(std::move(q));
    });
    return questions;
}

std::vector<QuestionSet> load_questions(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_questions(in);
}

void write_questions(std::ostream& out, const std::vector<QuestionSet>& questions) {
    for (const auto& q : questions) {
        json variants = json::object();
        for (const auto& [d, text] : q.variants) variants[std::string(to_string(d))] = text;
        json obj = {{"id", q.id},
                    {"qtype", std::string(to_string(q.qtype))},
                    {"domain", std::string(to_string(q.domain))},
                    {"standard_q", q.standard_q},
                    {"variants", variants}};
        out << obj.dump() << '\n';
    }
}

void save_questions(const std::filesystem::path& path, const std::vector<QuestionSet>& questions) {
    auto out = open_out(path);
    write_questions(out, questions);
}

}  // namespace de::corpus
