#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "arct/crowd.hpp"
#include "arct/random.hpp"

namespace arct::bench {

inline std::vector<crowd::WorkerResponse> simulated_responses(int n_items, int n_workers,
                                                              double competence,
                                                              std::uint64_t seed) {
    Rng rng(seed);
    std::vector<crowd::WorkerResponse> responses;
    responses.reserve(static_cast<size_t>(n_items) * static_cast<size_t>(n_workers));
    for (int i = 0; i < n_items; ++i) {
        const std::string truth = rng.coin() ? "1" : "0";
        for (int w = 0; w < n_workers; ++w) {
            crowd::WorkerResponse r;
            char buf[24];
            std::snprintf(buf, sizeof(buf), "item%05d", i);
            r.item_id = buf;
            std::snprintf(buf, sizeof(buf), "w%03d", w);
            r.worker_id = buf;
            r.submission_time = 1600000000.0 + w;
            r.label = rng.uniform() < competence ? truth : (rng.coin() ? "1" : "0");
            responses.push_back(std::move(r));
        }
    }
    return responses;
}

} // namespace arct::bench
