#include "dialect_eval/pipeline/runlog.hpp"

#include <spdlog/spdlog.h>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/hash.hpp"

namespace de::pipeline {

using json = nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json verified(const std::string& line, const std::filesystem::path& path, std::size_t lineno) {
    json row;
    try {
        row = json::parse(line);
    } catch (const json::exception&) {
        throw Error(Errc::CorruptLog, path.string() + ": unparseable row", lineno);
    }
    if (!row.is_object() || !row.contains("row_hash") || !row["row_hash"].is_string() ||
        row["row_hash"].get<std::string>() != row_hash(row)) {
        throw Error(Errc::CorruptLog, path.string() + ": row hash mismatch", lineno);
    }
    return row;
}

// Splits complete lines; returns the byte length of the intact prefix.
std::size_t split_lines(const std::string& data, std::vector<std::string>& lines) {
    std::size_t start = 0;
    for (;;) {
        const auto nl = data.find('\n', start);
        if (nl == std::string::npos) return start;
        lines.push_back(data.substr(start, nl - start));
        start = nl + 1;
    }
}

}  // namespace

std::string row_hash(const json& row) {
    json copy = row;
    copy.erase("row_hash");
    return sha256_hex(copy.dump());
}

RunLog::RunLog(std::filesystem::path path, KeyFn key) : path_(std::move(path)), key_(std::move(key)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    if (std::filesystem::exists(path_)) {
        const std::string data = slurp(path_);
        std::vector<std::string> lines;
        std::size_t keep = split_lines(data, lines);
        // A crash can leave one torn line at the end, with or without its newline.
        if (keep < data.size()) {
            spdlog::warn("{}: dropping incomplete trailing line", path_.string());
        } else if (!lines.empty()) {
            try {
                verified(lines.back(), path_, lines.size());
            } catch (const Error&) {
                spdlog::warn("{}: dropping torn trailing row", path_.string());
                keep -= lines.back().size() + 1;
                lines.pop_back();
            }
        }
        if (keep < data.size()) std::filesystem::resize_file(path_, keep);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            json row = verified(lines[i], path_, i + 1);
            keys_.insert(key_(row));
            rows_.push_back(std::move(row));
        }
    }
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw Error(Errc::Io, "cannot open " + path_.string() + " for append");
}

bool RunLog::completed(const std::string& key) const { return keys_.count(key) > 0; }

bool RunLog::append(json row) {
    std::lock_guard lock(mu_);
    const std::string key = key_(row);
    if (keys_.count(key)) return false;
    row["row_hash"] = row_hash(row);
    out_ << row.dump() << '\n';
    out_.flush();
    if (!out_) throw Error(Errc::Io, "write failed: " + path_.string());
    keys_.insert(key);
    rows_.push_back(std::move(row));
    return true;
}

std::vector<json> RunLog::read(const std::filesystem::path& path) {
    const std::string data = slurp(path);
    std::vector<std::string> lines;
    split_lines(data, lines);
    std::vector<json> rows;
    rows.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) rows.push_back(verified(lines[i], path, i + 1));
    return rows;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(Errc::Io, "write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace de::pipeline
