#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "arct/crowd.hpp"
#include "arct/pipeline.hpp"

namespace arct::testsupport {

// A synthetic crowd run covering all eight steps. Records r00..r<n-1> all
// belong to debate "d1"; indexes 0..10 are each dropped (or disputed) at a
// planned stage, everything from index 11 on survives to the final dataset:
//   i0  -> split 2:2 at stage 8 (disputed)
//   i1  -> logic ratings 0,1,1 (mean 2/3 < 0.68), filtered at stage 7
//   i2  -> validation picks the distractor at stage 6
//   i3  -> majority "impossible" at stage 5
//   i4  -> disambiguated "both" at stage 4
//   i5  -> disambiguated "opposing_claim" at stage 4
//   i6  -> majority "wrong_reason" at stage 3
//   i7  -> empty span votes at stage 2
//   i8  -> stance "none" at stage 1
//   i9  -> stance "neutral" at stage 1
//   i10 -> unanimous "invalid" at stage 8
struct PipelineFixture {
    std::vector<pipeline::PipelineRecord> seeds;
    std::map<int, std::vector<crowd::WorkerResponse>> responses; // by stage
    std::set<std::string> expected_final_ids;
    std::set<std::string> expected_disputed_ids;
};

inline std::string fixture_record_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "r%02d", i);
    return buf;
}

inline PipelineFixture make_pipeline_fixture(int n) {
    PipelineFixture fx;
    auto resp = [](const std::string& item, const std::string& worker, const std::string& label,
                   double t) {
        return crowd::WorkerResponse{item, worker, 1600000000.0 + t, label};
    };

    for (int i = 0; i < n; ++i) {
        pipeline::PipelineRecord rec;
        rec.record_id = fixture_record_id(i);
        rec.debate_id = "d1";
        rec.stage = 0;
        rec.claim = "pro claim";
        rec.opposing_claim = "con claim";
        fx.seeds.push_back(rec);

        const std::string id = rec.record_id;
        const bool drops_at = i <= 10;

        // Stage 1: stance plus sarcasm.
        std::string stance = "claim";
        if (drops_at && i == 8) stance = "none";
        if (drops_at && i == 9) stance = "neutral";
        for (int w = 1; w <= 3; ++w)
            fx.responses[1].push_back(resp(id, "w" + std::to_string(w), stance, w));
        const std::string sarcasm = i % 4 == 0 ? "sarcastic" : "not_sarcastic";
        for (int w = 1; w <= 3; ++w)
            fx.responses[1].push_back(resp(id, "s" + std::to_string(w), sarcasm, w));
        if (stance != "claim") continue;

        // Stage 2: reason spans.
        const bool no_spans = drops_at && i == 7;
        fx.responses[2].push_back(resp(id, "w1", no_spans ? "spans:" : "spans:0-5", 1));
        fx.responses[2].push_back(resp(id, "w2", no_spans ? "spans:" : "spans:0-5", 2));
        fx.responses[2].push_back(resp(id, "w3", no_spans ? "spans:" : "spans:0-3", 3));
        if (no_spans) continue;

        // Stage 3: gists.
        if (drops_at && i == 6) {
            fx.responses[3].push_back(resp(id, "w1", "wrong_reason", 1));
            fx.responses[3].push_back(resp(id, "w2", "wrong_reason", 2));
            fx.responses[3].push_back(resp(id, "w3", "gist:stray gist", 3));
            continue;
        }
        fx.responses[3].push_back(resp(id, "w1", "gist:reason gist " + id + " alpha", 1));
        fx.responses[3].push_back(resp(id, "w2", "gist:later gist " + id, 2));

        // Stage 4: disambiguation.
        std::string disambiguation = "original_claim";
        if (drops_at && i == 4) disambiguation = "both";
        if (drops_at && i == 5) disambiguation = "opposing_claim";
        for (int w = 1; w <= 3; ++w)
            fx.responses[4].push_back(resp(id, "w" + std::to_string(w), disambiguation, w));
        if (disambiguation != "original_claim") continue;

        // Stage 5: alternative warrants.
        if (drops_at && i == 3) {
            for (int w = 1; w <= 3; ++w)
                fx.responses[5].push_back(resp(id, "w" + std::to_string(w), "impossible", w));
            continue;
        }
        fx.responses[5].push_back(resp(id, "w1", "aw:alternative warrant " + id, 1));
        fx.responses[5].push_back(resp(id, "w2", "aw:later alternative " + id, 2));

        // Stage 6: validation plus logic ratings.
        const std::string validation = drops_at && i == 2 ? "distractor_reason" : "original_reason";
        for (int w = 1; w <= 3; ++w)
            fx.responses[6].push_back(resp(id, "w" + std::to_string(w), validation, w));
        const bool weak_logic = drops_at && i == 1;
        fx.responses[6].push_back(resp(id, "rater1", weak_logic ? "0" : "1", 4));
        fx.responses[6].push_back(resp(id, "rater2", weak_logic ? "1" : "2", 5));
        fx.responses[6].push_back(resp(id, "rater3", weak_logic ? "1" : "2", 6));
        if (validation != "original_reason") continue;

        // Stage 7: warrants (the logic filter drops i1 before writing).
        if (!weak_logic) {
            fx.responses[7].push_back(resp(id, "w1", "w:warrant " + id, 1));
            fx.responses[7].push_back(resp(id, "w2", "w:later warrant " + id, 2));
        }

        // Stage 8: validation votes.
        if (drops_at && i == 0) {
            fx.responses[8].push_back(resp(id, "w1", "valid", 1));
            fx.responses[8].push_back(resp(id, "w2", "valid", 2));
            fx.responses[8].push_back(resp(id, "w3", "invalid", 3));
            fx.responses[8].push_back(resp(id, "w4", "invalid", 4));
            fx.expected_disputed_ids.insert(id);
            continue;
        }
        if (drops_at && i == 10) {
            for (int w = 1; w <= 3; ++w)
                fx.responses[8].push_back(resp(id, "w" + std::to_string(w), "invalid", w));
            continue;
        }
        if (!weak_logic) {
            for (int w = 1; w <= 3; ++w)
                fx.responses[8].push_back(resp(id, "w" + std::to_string(w), "valid", w));
            fx.expected_final_ids.insert(id);
        }
    }
    return fx;
}

} // namespace arct::testsupport
