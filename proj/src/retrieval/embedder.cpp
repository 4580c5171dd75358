#include "dialect_eval/retrieval/embedder.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/hash.hpp"
#include "dialect_eval/common/matrix.hpp"
#include "dialect_eval/common/utf8.hpp"
#include "dialect_eval/corpus/text.hpp"

namespace de::retrieval {

using json = nlohmann::json;

namespace {

void add_feature(std::vector<double>& v, std::string_view feature, double weight) {
    const std::uint64_t h = fnv1a64(feature);
    const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
    v[h % v.size()] += sign * weight;
}

}  // namespace

std::vector<double> HashEmbedder::embed_one(const std::string& text) const {
    std::vector<double> v(dim_, 0.0);
    const auto key = corpus::normalize_text(text).key;
    for (const auto& token : corpus::tokenize(key)) {
        add_feature(v, "w:" + token, 1.0);
        const auto cps = utf8::decode("^" + token + "$");
        for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
            add_feature(v, "c:" + utf8::encode(std::u32string_view(cps).substr(i, 3)), 0.5);
        }
    }
    // Keeps empty text representable.
    v[0] += 1e-3;
    const double norm = l2_norm(v);
    for (double& x : v) x /= norm;
    return v;
}

std::vector<std::vector<double>> HashEmbedder::embed(std::span<const std::string> texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

CachingEmbedder::CachingEmbedder(Embedder& inner, std::filesystem::path dir) : inner_(inner), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path CachingEmbedder::entry_path(const std::string& text) const {
    return dir_ / (sha256_hex(inner_.model_name() + '\x1f' + text) + ".json");
}

std::vector<std::vector<double>> CachingEmbedder::embed(std::span<const std::string> texts) {
    std::vector<std::vector<double>> out(texts.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto path = entry_path(texts[i]);
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            missing.push_back(i);
            continue;
        }
        try {
            const json doc = json::parse(in);
            auto vec = doc.at("vector").get<std::vector<double>>();
            if (vec.empty() || doc.at("model").get<std::string>() != inner_.model_name()) {
                throw std::runtime_error("entry does not match");
            }
            out[i] = std::move(vec);
            ++hits_;
        } catch (const std::exception& e) {
            spdlog::warn("embedding cache entry {} unreadable ({}); re-fetching", path.string(), e.what());
            ++corrupt_;
            missing.push_back(i);
        }
    }
    if (missing.empty()) return out;

    std::vector<std::string> batch;
    batch.reserve(missing.size());
    for (std::size_t i : missing) batch.push_back(texts[i]);
    auto fetched = inner_.embed(batch);
    if (fetched.size() != batch.size()) {
        throw Error(Errc::DimensionMismatch, "embedder returned " + std::to_string(fetched.size()) +
                                                 " vectors for " + std::to_string(batch.size()) + " texts");
    }
    std::lock_guard lock(mu_);
    for (std::size_t j = 0; j < missing.size(); ++j) {
        const std::size_t i = missing[j];
        const auto path = entry_path(texts[i]);
        const auto tmp = std::filesystem::path(path.string() + ".tmp");
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw Error(Errc::Io, "cannot write " + tmp.string());
            f << json{{"model", inner_.model_name()}, {"vector", fetched[j]}}.dump();
        }
        std::filesystem::rename(tmp, path);
        out[i] = std::move(fetched[j]);
        ++misses_;
    }
    return out;
}

}  // namespace de::retrieval
