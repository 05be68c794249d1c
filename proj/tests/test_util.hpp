#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "powerbench/time_series.hpp"

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& hint) {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("powerbench_" + hint + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::filesystem::path write_file(const std::filesystem::path& path,
                                        const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Uniform grid k*dt for k in [0, n].
inline std::vector<double> uniform_grid(double dt, size_t n) {
    std::vector<double> ts(n + 1);
    for (size_t k = 0; k <= n; ++k) ts[k] = static_cast<double>(k) * dt;
    return ts;
}

inline powerbench::TimeSeries constant_series(double dt, size_t n, double value) {
    return {uniform_grid(dt, n), std::vector<double>(n + 1, value)};
}
