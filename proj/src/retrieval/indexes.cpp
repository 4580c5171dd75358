#include "dialect_eval/retrieval/indexes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/corpus/text.hpp"

namespace de::retrieval {

using json = nlohmann::json;

namespace {

void require_k(std::size_t k) {
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
}

void sort_hits(std::vector<Hit>& hits) {
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.pair_id < b.pair_id;
    });
}

}  // namespace

DenseIndex::DenseIndex(std::vector<std::string> ids, const Matrix& vectors) : ids_(std::move(ids)) {
    if (ids_.size() != vectors.rows()) {
        throw Error(Errc::DimensionMismatch, "id count differs from vector count");
    }
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        const double norm = l2_norm(vectors.row(i));
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw Error(Errc::DimensionMismatch, "zero vector for '" + ids_[i] + "' cannot be normalized");
        }
        vectors_.append_row(unit_normalized(vectors.row(i)));
        if (!by_id_.emplace(ids_[i], i).second) throw Error(Errc::DuplicateId, "duplicate id '" + ids_[i] + "'");
    }
}

std::optional<std::size_t> DenseIndex::find(std::string_view id) const {
    if (auto it = by_id_.find(std::string(id)); it != by_id_.end()) return it->second;
    return std::nullopt;
}

double DenseIndex::cosine(std::size_t doc, std::span<const double> query) const {
    if (query.size() != dim()) {
        throw Error(Errc::DimensionMismatch,
                    "query has dimension " + std::to_string(query.size()) + ", index has " + std::to_string(dim()));
    }
    const double norm = l2_norm(query);
    if (!(norm > 0.0)) return 0.0;
    return dot(vector(doc), query) / norm;
}

std::vector<Hit> DenseIndex::search(std::span<const double> query, std::size_t k) const {
    require_k(k);
    if (size() > 0 && query.size() != dim()) {
        throw Error(Errc::DimensionMismatch,
                    "query has dimension " + std::to_string(query.size()) + ", index has " + std::to_string(dim()));
    }
    std::vector<Hit> hits;
    hits.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) hits.push_back({ids_[i], cosine(i, query)});
    sort_hits(hits);
    if (hits.size() > k) hits.resize(k);
    return hits;
}

void DenseIndex::save(std::ostream& out) const {
    json rows = json::array();
    for (std::size_t i = 0; i < size(); ++i) rows.push_back(std::vector<double>(vector(i).begin(), vector(i).end()));
    out << json{{"ids", ids_}, {"dim", dim()}, {"vectors", rows}}.dump() << '\n';
}

DenseIndex DenseIndex::load(std::istream& in) {
    try {
        const json doc = json::parse(in);
        Matrix m;
        for (const auto& row : doc.at("vectors")) m.append_row(row.get<std::vector<double>>());
        DenseIndex idx(doc.at("ids").get<std::vector<std::string>>(), m);
        idx.vectors_ = std::move(m);  // stored rows are already unit length; keep them bit-exact
        return idx;
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptLog, std::string("dense index: ") + e.what());
    }
}

SparseIndex::SparseIndex(std::vector<std::string> ids, const std::vector<std::vector<std::string>>& docs,
                         Bm25Params params)
    : ids_(std::move(ids)), params_(params) {
    if (ids_.size() != docs.size()) throw Error(Errc::DimensionMismatch, "id count differs from document count");
    std::size_t total = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (!by_id_.emplace(ids_[d], d).second) throw Error(Errc::DuplicateId, "duplicate id '" + ids_[d] + "'");
        doc_lengths_.push_back(docs[d].size());
        total += docs[d].size();
        std::unordered_map<std::string, std::size_t> counts;
        for (const auto& t : docs[d]) ++counts[t];
        for (const auto& [term, tf] : counts) postings_[term].push_back({d, tf});
    }
    avgdl_ = docs.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs.size());
}

std::size_t SparseIndex::doc_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

std::size_t SparseIndex::term_frequency(const std::string& term, std::size_t doc) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return 0;
    // Postings are appended in document order.
    const auto& list = it->second;
    auto p = std::lower_bound(list.begin(), list.end(), doc, [](const Posting& x, std::size_t d) { return x.doc < d; });
    return (p != list.end() && p->doc == doc) ? p->tf : 0;
}

std::optional<std::size_t> SparseIndex::find(std::string_view id) const {
    if (auto it = by_id_.find(std::string(id)); it != by_id_.end()) return it->second;
    return std::nullopt;
}

double SparseIndex::idf(const std::string& term) const {
    const double n = static_cast<double>(size());
    const double df = static_cast<double>(doc_frequency(term));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double SparseIndex::score(std::size_t doc, const std::vector<std::string>& query_tokens) const {
    const std::set<std::string> terms(query_tokens.begin(), query_tokens.end());
    const double norm_len =
        avgdl_ > 0.0 ? static_cast<double>(doc_lengths_[doc]) / avgdl_ : 0.0;
    double s = 0.0;
    for (const auto& term : terms) {
        const double tf = static_cast<double>(term_frequency(term, doc));
        if (tf == 0.0) continue;
        const double denom = tf + params_.k1 * (1.0 - params_.b + params_.b * norm_len);
        s += idf(term) * tf * (params_.k1 + 1.0) / denom;
    }
    return s;
}

std::vector<Hit> SparseIndex::search(const std::vector<std::string>& query_tokens, std::size_t k) const {
    require_k(k);
    std::unordered_map<std::size_t, double> scores;
    for (const auto& term : std::set<std::string>(query_tokens.begin(), query_tokens.end())) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double w = idf(term);
        for (const auto& p : it->second) {
            const double tf = static_cast<double>(p.tf);
            const double norm_len = static_cast<double>(doc_lengths_[p.doc]) / avgdl_;
            scores[p.doc] += w * tf * (params_.k1 + 1.0) / (tf + params_.k1 * (1.0 - params_.b + params_.b * norm_len));
        }
    }
    std::vector<Hit> hits;
    hits.reserve(scores.size());
    for (const auto& [doc, s] : scores) hits.push_back({ids_[doc], s});
    sort_hits(hits);
    if (hits.size() > k) hits.resize(k);
    return hits;
}

void SparseIndex::save(std::ostream& out) const {
    json postings = json::object();
    for (const auto& [term, list] : postings_) {
        json entries = json::array();
        for (const auto& p : list) entries.push_back({p.doc, p.tf});
        postings[term] = entries;
    }
    out << json{{"ids", ids_},
                {"doc_lengths", doc_lengths_},
                {"avgdl", avgdl_},
                {"k1", params_.k1},
                {"b", params_.b},
                {"postings", postings}}
               .dump()
        << '\n';
}

SparseIndex SparseIndex::load(std::istream& in) {
    try {
        const json doc = json::parse(in);
        SparseIndex idx;
        idx.ids_ = doc.at("ids").get<std::vector<std::string>>();
        idx.doc_lengths_ = doc.at("doc_lengths").get<std::vector<std::size_t>>();
        idx.avgdl_ = doc.at("avgdl").get<double>();
        idx.params_ = {doc.at("k1").get<double>(), doc.at("b").get<double>()};
        for (std::size_t i = 0; i < idx.ids_.size(); ++i) idx.by_id_.emplace(idx.ids_[i], i);
        for (const auto& [term, entries] : doc.at("postings").items()) {
            auto& list = idx.postings_[term];
            for (const auto& e : entries) list.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
        }
        if (idx.doc_lengths_.size() != idx.ids_.size()) throw Error(Errc::CorruptLog, "sparse index: length mismatch");
        return idx;
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptLog, std::string("sparse index: ") + e.what());
    }
}

std::vector<std::string> standard_tokens(const corpus::SentencePair& pair) {
    return corpus::tokenize(corpus::normalize_text(pair.standard).key);
}

std::pair<DenseIndex, SparseIndex> build_indexes(const std::vector<corpus::SentencePair>& pairs,
                                                 const std::unordered_map<std::string, std::vector<double>>& embeddings,
                                                 Bm25Params params) {
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> docs;
    Matrix vectors;
    for (const auto& p : pairs) {
        auto it = embeddings.find(p.id);
        if (it == embeddings.end()) throw Error(Errc::MissingEmbedding, "no embedding for '" + p.id + "'");
        if (vectors.rows() > 0 && it->second.size() != vectors.cols()) {
            throw Error(Errc::DimensionMismatch, "embedding for '" + p.id + "' has dimension " +
                                                     std::to_string(it->second.size()) + ", expected " +
                                                     std::to_string(vectors.cols()));
        }
        vectors.append_row(it->second);
        ids.push_back(p.id);
        docs.push_back(standard_tokens(p));
    }
    DenseIndex dense(ids, vectors);
    SparseIndex sparse(std::move(ids), docs, params);
    return {std::move(dense), std::move(sparse)};
}

}  // namespace de::retrieval
