#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace de::pipeline {

/// sha256 of the row serialized without its "row_hash" field.
std::string row_hash(const nlohmann::json& row);

/// Append-only NDJSON file. Every row carries a row_hash. Opening truncates a
/// torn final line left by a crash; a bad hash anywhere else is CorruptLog.
class RunLog {
public:
    using KeyFn = std::function<std::string(const nlohmann::json&)>;

    RunLog(std::filesystem::path path, KeyFn key);

    const std::filesystem::path& path() const noexcept { return path_; }
    const std::vector<nlohmann::json>& rows() const noexcept { return rows_; }
    bool completed(const std::string& key) const;
    std::size_t size() const noexcept { return rows_.size(); }

    /// Stamps row_hash and appends. Rows whose key is already present are
    /// dropped; returns whether the row was written.
    bool append(nlohmann::json row);

    /// Reads and verifies a log without opening it for writing.
    static std::vector<nlohmann::json> read(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    KeyFn key_;
    std::vector<nlohmann::json> rows_;
    std::set<std::string> keys_;
    std::ofstream out_;
    std::mutex mu_;
};

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace de::pipeline
