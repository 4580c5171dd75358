#pragma once

#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialect_eval/pipeline/verdicts.hpp"

namespace de::pipeline {

struct ReviewResponse {
    int status = 200;
    nlohmann::json body;
};

/// State behind the review API: the fallback queue file plus rubric weights.
/// Readers share, override writes are exclusive and land atomically on disk.
class ReviewService {
public:
    ReviewService(std::filesystem::path queue_path, judging::RubricWeights weights = {});

    /// status: "", "pending" or "resolved".
    ReviewResponse queue(const std::string& status) const;
    ReviewResponse item(const std::string& verdict_ref) const;
    /// Body: {"verdict_ref", "likert": [5 ints 0-5], "script_valid", "note"}.
    /// 400 on bad JSON, 422 on validation errors, 404 on unknown refs.
    /// Last write wins.
    ReviewResponse submit(const std::string& body);
    ReviewResponse progress() const;
    ReviewResponse weights() const;

private:
    std::filesystem::path path_;
    judging::RubricWeights weights_;
    std::vector<FallbackItem> items_;
    mutable std::shared_mutex mu_;
};

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string token;  // bearer token; empty disables auth
};

/// HTTP server for the review API.
class ReviewServer {
public:
    explicit ReviewServer(ReviewService& service, ServeOptions options = {});
    ~ReviewServer();
    ReviewServer(const ReviewServer&) = delete;
    ReviewServer& operator=(const ReviewServer&) = delete;

    /// Binds; returns the bound port. Throws BindError.
    int bind();
    /// Serves until stop(). Call bind() first.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace de::pipeline
