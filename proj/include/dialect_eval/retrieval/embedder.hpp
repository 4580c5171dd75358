#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace de::retrieval {

/// Anything that turns texts into equal-dimension vectors.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
    virtual std::string model_name() const = 0;
};

/// Deterministic feature-hashing embedder over normalized tokens and
/// character trigrams. Used for tests and offline runs.
class HashEmbedder final : public Embedder {
public:
    explicit HashEmbedder(std::size_t dim = 64) : dim_(dim) {}

    std::vector<double> embed_one(const std::string& text) const;
    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
    std::string model_name() const override { return "hash-embedder-" + std::to_string(dim_); }

private:
    std::size_t dim_;
};

/// Disk cache in front of another embedder, one JSON file per text keyed by
/// sha256(model, text). Unreadable entries are re-fetched and rewritten.
class CachingEmbedder final : public Embedder {
public:
    CachingEmbedder(Embedder& inner, std::filesystem::path dir);

    std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
    std::string model_name() const override { return inner_.model_name(); }

    std::size_t hits() const noexcept { return hits_; }
    std::size_t misses() const noexcept { return misses_; }
    std::size_t corrupt() const noexcept { return corrupt_; }

    std::filesystem::path entry_path(const std::string& text) const;

private:
    Embedder& inner_;
    std::filesystem::path dir_;
    std::mutex mu_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
    std::atomic<std::size_t> corrupt_{0};
};

}  // namespace de::retrieval
