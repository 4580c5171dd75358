#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dialect_eval/corpus/records.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "dialect_eval/retrieval/indexes.hpp"

namespace de::retrieval {

struct WeightProfile {
    double dense_w = 0.7;
    double sparse_w = 0.3;
    std::size_t pool_k = 10;
    double district_bonus = 0.1;
    double char_bonus_w = 0.1;

    /// Throws InvalidConfig unless weights lie in [0,1] and sum to 1.
    void validate() const;
};

struct RetrievalConfig {
    Bm25Params bm25;
    WeightProfile standard{0.7, 0.3, 10, 0.1, 0.1};
    WeightProfile short_query{0.4, 0.6, 25, 0.1, 0.1};
    /// Dense hits at or below this cosine are not admitted to the pool.
    double dense_min_sim = 0.0;
    std::size_t fewshot_k = 5;

    void validate() const;
};

struct Candidate {
    std::string pair_id;
    std::string standard_text;
    std::string dialect_text;
    corpus::Dialect district = corpus::Dialect::Barishal;
    double dense_sim = 0.0;
    double sparse_score = 0.0;
    double sparse_scaled = 0.0;  // min-max within the pool
    double blended = 0.0;
    bool district_match = false;
    double char_sim = 0.0;
    double overlap = 0.0;  // deep-search token overlap ratio
    bool from_deep_search = false;
};

/// dense_w*dense + sparse_w*sparse_scaled + district_bonus*[match] + char_bonus_w*char_sim
double blended_score(const Candidate& c, const WeightProfile& profile) noexcept;

/// Token-overlap fallback: |query ∩ standard| / |query| over unique tokens,
/// char similarity as tiebreak, then ascending id. Returns the top `needed`.
std::vector<Candidate> deep_search(const corpus::TaggedQuery& q, std::span<const corpus::SentencePair> pairs,
                                   std::size_t needed);

struct RetrievalResult {
    std::vector<Candidate> candidates;
    bool short_profile = false;
    std::size_t pool_k = 0;
    std::size_t unique_in_union = 0;
    bool deep_search_used = false;
};

class HybridRetriever {
public:
    HybridRetriever(std::vector<corpus::SentencePair> pairs, DenseIndex dense, SparseIndex sparse,
                    RetrievalConfig config = {});

    const RetrievalConfig& config() const noexcept { return config_; }
    const std::vector<corpus::SentencePair>& pairs() const noexcept { return pairs_; }
    const DenseIndex& dense() const noexcept { return dense_; }
    const SparseIndex& sparse() const noexcept { return sparse_; }

    const WeightProfile& profile_for(const corpus::TaggedQuery& q) const noexcept {
        return q.is_short ? config_.short_query : config_.standard;
    }

    RetrievalResult retrieve(const corpus::TaggedQuery& q, std::span<const double> query_vec,
                             corpus::Dialect district, std::size_t k) const;

private:
    Candidate make_candidate(std::size_t doc, const corpus::TaggedQuery& q, std::span<const double> query_vec,
                             corpus::Dialect district) const;

    std::vector<corpus::SentencePair> pairs_;
    std::vector<std::string> keys_;  // normalized matching key of each standard side
    DenseIndex dense_;
    SparseIndex sparse_;
    RetrievalConfig config_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace de::retrieval
