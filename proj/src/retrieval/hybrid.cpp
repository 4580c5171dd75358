#include "dialect_eval/retrieval/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/utf8.hpp"

namespace de::retrieval {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

std::string content_key(const corpus::SentencePair& p) { return p.standard + '\x1f' + p.dialect; }

}  // namespace

void WeightProfile::validate() const {
    if (!in_unit(dense_w) || !in_unit(sparse_w) || std::abs(dense_w + sparse_w - 1.0) > 1e-9) {
        throw Error(Errc::InvalidConfig, "dense_w and sparse_w must lie in [0,1] and sum to 1");
    }
    if (pool_k == 0) throw Error(Errc::InvalidConfig, "pool_k must be positive");
    if (district_bonus < 0.0 || char_bonus_w < 0.0) throw Error(Errc::InvalidConfig, "bonuses must be non-negative");
}

void RetrievalConfig::validate() const {
    standard.validate();
    short_query.validate();
    if (bm25.k1 < 0.0 || bm25.b < 0.0 || bm25.b > 1.0) throw Error(Errc::InvalidConfig, "invalid BM25 parameters");
    if (fewshot_k == 0) throw Error(Errc::InvalidConfig, "fewshot_k must be positive");
}

double blended_score(const Candidate& c, const WeightProfile& profile) noexcept {
    return profile.dense_w * c.dense_sim + profile.sparse_w * c.sparse_scaled +
           profile.district_bonus * (c.district_match ? 1.0 : 0.0) + profile.char_bonus_w * c.char_sim;
}

std::vector<Candidate> deep_search(const corpus::TaggedQuery& q, std::span<const corpus::SentencePair> pairs,
                                   std::size_t needed) {
    const std::set<std::string> query_terms(q.tokens.begin(), q.tokens.end());
    std::vector<Candidate> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        const std::string key = corpus::normalize_text(p.standard).key;
        const auto tokens = corpus::tokenize(key);
        const std::set<std::string> doc_terms(tokens.begin(), tokens.end());
        std::size_t shared = 0;
        for (const auto& t : query_terms) shared += doc_terms.count(t);

        Candidate c;
        c.pair_id = p.id;
        c.standard_text = p.standard;
        c.dialect_text = p.dialect;
        c.district = p.district;
        c.overlap = query_terms.empty() ? 0.0 : static_cast<double>(shared) / static_cast<double>(query_terms.size());
        c.char_sim = utf8::levenshtein_similarity(q.normalized, key);
        c.from_deep_search = true;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        if (a.char_sim != b.char_sim) return a.char_sim > b.char_sim;
        return a.pair_id < b.pair_id;
    });
    if (out.size() > needed) out.resize(needed);
    return out;
}

HybridRetriever::HybridRetriever(std::vector<corpus::SentencePair> pairs, DenseIndex dense, SparseIndex sparse,
                                 RetrievalConfig config)
    : pairs_(std::move(pairs)), dense_(std::move(dense)), sparse_(std::move(sparse)), config_(config) {
    config_.validate();
    keys_.reserve(pairs_.size());
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto& p = pairs_[i];
        if (!dense_.find(p.id)) throw Error(Errc::MissingEmbedding, "dense index lacks '" + p.id + "'");
        if (!sparse_.find(p.id)) throw Error(Errc::MissingEmbedding, "sparse index lacks '" + p.id + "'");
        by_id_.emplace(p.id, i);
        keys_.push_back(corpus::normalize_text(p.standard).key);
    }
}

Candidate HybridRetriever::make_candidate(std::size_t doc, const corpus::TaggedQuery& q,
                                          std::span<const double> query_vec, corpus::Dialect district) const {
    const auto& p = pairs_[doc];
    Candidate c;
    c.pair_id = p.id;
    c.standard_text = p.standard;
    c.dialect_text = p.dialect;
    c.district = p.district;
    c.dense_sim = dense_.cosine(*dense_.find(p.id), query_vec);
    c.sparse_score = sparse_.score(*sparse_.find(p.id), q.tokens);
    c.district_match = p.district == district;
    c.char_sim = utf8::levenshtein_similarity(q.normalized, keys_[doc]);
    return c;
}

RetrievalResult HybridRetriever::retrieve(const corpus::TaggedQuery& q, std::span<const double> query_vec,
                                          corpus::Dialect district, std::size_t k) const {
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
    const WeightProfile& profile = profile_for(q);

    RetrievalResult result;
    result.short_profile = q.is_short;
    result.pool_k = profile.pool_k;

    std::set<std::size_t> pool;
    for (const auto& hit : dense_.search(query_vec, profile.pool_k)) {
        if (hit.score > config_.dense_min_sim) pool.insert(by_id_.at(hit.pair_id));
    }
    for (const auto& hit : sparse_.search(q.tokens, profile.pool_k)) pool.insert(by_id_.at(hit.pair_id));

    std::set<std::string> unique_content;
    for (std::size_t doc : pool) unique_content.insert(content_key(pairs_[doc]));
    result.unique_in_union = unique_content.size();

    std::set<std::size_t> from_deep;
    if (unique_content.size() < 2) {
        result.deep_search_used = true;
        for (const auto& c : deep_search(q, pairs_, std::max<std::size_t>(k, 2))) {
            const std::size_t doc = by_id_.at(c.pair_id);
            if (pool.insert(doc).second) from_deep.insert(doc);
        }
    }

    std::vector<Candidate> cands;
    cands.reserve(pool.size());
    for (std::size_t doc : pool) {
        Candidate c = make_candidate(doc, q, query_vec, district);
        c.from_deep_search = from_deep.count(doc) > 0;
        cands.push_back(std::move(c));
    }

    if (!cands.empty()) {
        auto [lo, hi] = std::minmax_element(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            return a.sparse_score < b.sparse_score;
        });
        const double min_s = lo->sparse_score;
        const double max_s = hi->sparse_score;
        for (auto& c : cands) {
            if (max_s > min_s) {
                c.sparse_scaled = (c.sparse_score - min_s) / (max_s - min_s);
            } else {
                c.sparse_scaled = max_s > 0.0 ? 1.0 : 0.0;
            }
            c.blended = blended_score(c, profile);
        }
    }

    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.blended != b.blended) return a.blended > b.blended;
        return a.pair_id < b.pair_id;
    });

    std::set<std::string> seen;
    for (auto& c : cands) {
        if (result.candidates.size() == k) break;
        if (!seen.insert(c.standard_text + '\x1f' + c.dialect_text).second) continue;
        result.candidates.push_back(std::move(c));
    }
    return result;
}

}  // namespace de::retrieval
