#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

#include "dialect_eval/common/error.hpp"

namespace testing {

/// Removed with its contents on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "de") {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// The Errc thrown by `f`, or nullopt when it returns normally.
template <typename F>
std::optional<de::Errc> error_of(F&& f) {
    try {
        f();
    } catch (const de::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline const std::filesystem::path data_dir{DE_DATA_DIR};

}  // namespace testing
