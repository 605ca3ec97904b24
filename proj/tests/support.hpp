#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "arct/crowd.hpp"
#include "arct/random.hpp"

namespace arct::testsupport {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path = base / ("arct-test-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(file(name));
        out << content;
    }
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Synthetic crowd following the competence model: each worker copies the
// true label with probability `competence`, otherwise answers uniformly at
// random. Worker w's submissions arrive at time base + w, so the time split
// puts the first half of the workers into group A.
inline std::vector<crowd::WorkerResponse> simulate_crowd(int n_items, int n_workers,
                                                         double competence, std::uint64_t seed,
                                                         std::vector<std::string> labels = {"0",
                                                                                            "1"}) {
    Rng rng(seed);
    std::vector<crowd::WorkerResponse> responses;
    std::vector<std::string> truth(static_cast<size_t>(n_items));
    for (int i = 0; i < n_items; ++i)
        truth[static_cast<size_t>(i)] = labels[rng.below(labels.size())];
    for (int i = 0; i < n_items; ++i) {
        for (int w = 0; w < n_workers; ++w) {
            crowd::WorkerResponse r;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "item%04d", i);
            r.item_id = buf;
            std::snprintf(buf, sizeof(buf), "w%03d", w);
            r.worker_id = buf;
            r.submission_time = 1600000000.0 + static_cast<double>(w);
            r.label = rng.uniform() < competence ? truth[static_cast<size_t>(i)]
                                                 : labels[rng.below(labels.size())];
            responses.push_back(std::move(r));
        }
    }
    return responses;
}

} // namespace arct::testsupport
