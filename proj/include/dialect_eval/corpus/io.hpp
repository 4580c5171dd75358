#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dialect_eval/corpus/records.hpp"

namespace de::corpus {

enum class PairFormat {
    Jsonl,  // {"id","standard","dialect","district","source_tag"} per line
    Tsv,    // id \t standard \t dialect \t district \t source_tag
};

/// Reads, normalizes, and validates a sentence-pair corpus. Blank lines are
/// skipped. Errors: ParseError (with line), DuplicateId, InvalidDialect,
/// EmptyField.
std::vector<SentencePair> load_pairs(const std::filesystem::path& path, PairFormat format = PairFormat::Jsonl);
std::vector<SentencePair> read_pairs(std::istream& in, PairFormat format = PairFormat::Jsonl);

void write_pairs(std::ostream& out, const std::vector<SentencePair>& pairs, PairFormat format = PairFormat::Jsonl);
void save_pairs(const std::filesystem::path& path, const std::vector<SentencePair>& pairs,
                PairFormat format = PairFormat::Jsonl);

std::vector<QuestionSet> load_questions(const std::filesystem::path& path);
std::vector<QuestionSet> read_questions(std::istream& in);
void write_questions(std::ostream& out, const std::vector<QuestionSet>& questions);
void save_questions(const std::filesystem::path& path, const std::vector<QuestionSet>& questions);

}  // namespace de::corpus
