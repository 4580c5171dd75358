#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dialect_eval/common/matrix.hpp"
#include "dialect_eval/corpus/records.hpp"

namespace de::retrieval {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Hit {
    std::string pair_id;
    double score = 0.0;

    bool operator==(const Hit&) const = default;
};

/// Exact flat cosine index. Vectors are stored unit-normalized.
class DenseIndex {
public:
    DenseIndex() = default;

    /// Throws DimensionMismatch on ragged rows or a zero vector.
    DenseIndex(std::vector<std::string> ids, const Matrix& vectors);

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dim() const noexcept { return vectors_.cols(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::span<const double> vector(std::size_t doc) const noexcept { return vectors_.row(doc); }
    std::optional<std::size_t> find(std::string_view id) const;

    /// Cosine between a stored vector and an arbitrary (non-normalized) query.
    double cosine(std::size_t doc, std::span<const double> query) const;

    /// Sorted by cosine descending, ties by ascending id; min(k, size) hits.
    std::vector<Hit> search(std::span<const double> query, std::size_t k) const;

    void save(std::ostream& out) const;
    static DenseIndex load(std::istream& in);

private:
    std::vector<std::string> ids_;
    Matrix vectors_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Okapi BM25 over whitespace tokens with IDF = ln(1 + (N - df + 0.5) / (df + 0.5)).
class SparseIndex {
public:
    SparseIndex() = default;
    SparseIndex(std::vector<std::string> ids, const std::vector<std::vector<std::string>>& docs, Bm25Params params = {});

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const Bm25Params& params() const noexcept { return params_; }
    double avgdl() const noexcept { return avgdl_; }
    std::size_t doc_length(std::size_t doc) const noexcept { return doc_lengths_[doc]; }
    std::size_t doc_frequency(const std::string& term) const;
    std::size_t term_frequency(const std::string& term, std::size_t doc) const;
    std::optional<std::size_t> find(std::string_view id) const;

    double idf(const std::string& term) const;

    /// BM25 of one document; repeated query terms count once.
    double score(std::size_t doc, const std::vector<std::string>& query_tokens) const;

    /// Documents sharing at least one query term, sorted by score descending
    /// then ascending id. Empty when nothing matches.
    std::vector<Hit> search(const std::vector<std::string>& query_tokens, std::size_t k) const;

    void save(std::ostream& out) const;
    static SparseIndex load(std::istream& in);

private:
    struct Posting {
        std::size_t doc;
        std::size_t tf;
    };

    std::vector<std::string> ids_;
    std::vector<std::size_t> doc_lengths_;
    double avgdl_ = 0.0;
    Bm25Params params_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Matching-key tokens of a pair's standard side; what the sparse index sees.
std::vector<std::string> standard_tokens(const corpus::SentencePair& pair);

/// Throws MissingEmbedding for a pair without a vector and DimensionMismatch
/// for non-uniform or zero vectors.
std::pair<DenseIndex, SparseIndex> build_indexes(const std::vector<corpus::SentencePair>& pairs,
                                                 const std::unordered_map<std::string, std::vector<double>>& embeddings,
                                                 Bm25Params params = {});

}  // namespace de::retrieval
