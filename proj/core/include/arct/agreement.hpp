#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arct/crowd.hpp"

namespace arct::agreement {

struct LabelSeriesPair {
    std::vector<std::string> items;
    std::vector<std::string> labels_a;
    std::vector<std::string> labels_b;
};

using Span = std::pair<std::int64_t, std::int64_t>; // [start, end), token offsets

// A unitized document: each annotator marks non-overlapping relevant spans
// on a token continuum of the given length.
struct Continuum {
    std::string doc_id;
    std::int64_t length = 0;
    std::map<std::string, std::vector<Span>> unitizations;
};

// Cohen's kappa from the two label series. Returns nullopt when chance
// agreement is 1 (both raters constant and identical), where kappa is
// undefined; callers must treat that as degenerate data, not as zero.
std::optional<double> cohen_kappa(const LabelSeriesPair& pair);

// Krippendorff's alpha with the nominal distance over all pairable values
// (items with >= 2 responses). Missing responses are handled per item.
double krippendorff_alpha_nominal(const std::vector<crowd::WorkerResponse>& responses);

// Krippendorff's alpha for unitizing. Each annotator's continuum decomposes
// into relevant units and gaps; intersecting units from different annotators
// are compared with the squared non-overlap distance (squared difference of
// starts plus squared difference of ends for two relevant units, squared
// unit length for a relevant unit inside the other annotator's gap). The
// expected disagreement is the exact mean of the same statistic under
// uniform random placement of the pooled units, so identical unitizations
// give exactly 1 and systematic non-overlap goes negative.
double krippendorff_alpha_unitized(const std::vector<Continuum>& continua);

// Span JSONL: {"docId": str, "length": int, "annotator": str,
//              "spans": [[start, end], ...]}, one line per (doc, annotator).
std::vector<Continuum> load_continua(const std::string& path);

void save_continua(const std::vector<Continuum>& continua, const std::string& path);

} // namespace arct::agreement
