#include "arct/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "arct/error.hpp"
#include "arct/text.hpp"

namespace arct::agreement {

namespace {

using nlohmann::json;

struct Section {
    std::int64_t start;
    std::int64_t end;
    bool relevant;
    std::int64_t len() const { return end - start; }
};

bool intersects(const Section& a, const Section& b) {
    return a.start < b.end && b.start < a.end;
}

// Relevant units plus complementary gaps, covering [0, length).
std::vector<Section> decompose(const std::vector<Span>& spans, std::int64_t length,
                               const std::string& annotator, const std::string& doc_id) {
    std::vector<Span> sorted = spans;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Section> sections;
    std::int64_t cursor = 0;
    for (const auto& [s, e] : sorted) {
        if (s < 0 || e > length || s >= e)
            throw Error("continuum '" + doc_id + "', annotator '" + annotator +
                        "': span [" + std::to_string(s) + ", " + std::to_string(e) +
                        ") outside [0, " + std::to_string(length) + ") or empty");
        if (s < cursor)
            throw Error("continuum '" + doc_id + "', annotator '" + annotator +
                        "': overlapping spans");
        if (s > cursor) sections.push_back({cursor, s, false});
        sections.push_back({s, e, true});
        cursor = e;
    }
    if (cursor < length) sections.push_back({cursor, length, false});
    return sections;
}

double unit_distance(const Section& u, const Section& v) {
    if (!intersects(u, v)) return 0.0;
    if (v.relevant) {
        const double ds = static_cast<double>(u.start - v.start);
        const double de = static_cast<double>(u.end - v.end);
        return ds * ds + de * de;
    }
    if (v.start <= u.start && u.end <= v.end) {
        const double l = static_cast<double>(u.len());
        return l * l;
    }
    return 0.0;
}

// Mean of the relevant-relevant distance over all placements of two units of
// lengths p and q at uniform random integer offsets on a continuum of length
// B. Enumerated over the start-offset difference d with its multiplicity.
double expected_relevant_pair(std::int64_t p, std::int64_t q, std::int64_t B) {
    const double placements =
        static_cast<double>(B - p + 1) * static_cast<double>(B - q + 1);
    double sum = 0.0;
    // Start offsets a - c = d of intersecting placements satisfy -p < d < q.
    for (std::int64_t d = -(p - 1); d <= q - 1; ++d) {
        const std::int64_t lo = std::max<std::int64_t>(0, -d);
        const std::int64_t hi = std::min(B - q, B - p - d);
        if (hi < lo) continue;
        const double mult = static_cast<double>(hi - lo + 1);
        const double ds = static_cast<double>(d);
        const double de = static_cast<double>(d + p - q);
        sum += mult * (ds * ds + de * de);
    }
    return sum / placements;
}

// Probability that a random unit of length p lands entirely inside a random
// gap of length g, both placed uniformly on a continuum of length B.
double expected_gap_pair(std::int64_t p, std::int64_t g, std::int64_t B) {
    if (g < p) return 0.0;
    return static_cast<double>(g - p + 1) / static_cast<double>(B - p + 1);
}

} // namespace

std::optional<double> cohen_kappa(const LabelSeriesPair& pair) {
    const size_t n = pair.labels_a.size();
    if (n == 0) throw Error("cohen_kappa: empty label series");
    if (pair.labels_b.size() != n || (!pair.items.empty() && pair.items.size() != n))
        throw Error("cohen_kappa: series lengths differ");

    std::map<std::string, double> ma, mb;
    size_t matches = 0;
    for (size_t i = 0; i < n; ++i) {
        ma[pair.labels_a[i]] += 1.0;
        mb[pair.labels_b[i]] += 1.0;
        if (pair.labels_a[i] == pair.labels_b[i]) ++matches;
    }
    // p_e can only be 1 when both raters are constant and identical; detect
    // that structurally rather than through floating point.
    if (ma.size() == 1 && mb.size() == 1 && ma.begin()->first == mb.begin()->first)
        return std::nullopt;

    if (matches == n) return 1.0;

    const double dn = static_cast<double>(n);
    const double p_o = static_cast<double>(matches) / dn;
    double p_e = 0.0;
    for (const auto& [label, ca] : ma) {
        const auto it = mb.find(label);
        if (it != mb.end()) p_e += (ca / dn) * (it->second / dn);
    }
    return (p_o - p_e) / (1.0 - p_e);
}

double krippendorff_alpha_nominal(const std::vector<crowd::WorkerResponse>& responses) {
    std::map<std::string, std::vector<std::string>> units;
    for (const auto& r : responses) units[r.item_id].push_back(r.label);

    // Coincidence matrix over pairable values only.
    std::map<std::string, std::map<std::string, double>> o;
    std::map<std::string, double> totals;
    double n = 0.0;
    bool pairable = false;
    for (auto& [item, values] : units) {
        const size_t m = values.size();
        if (m < 2) continue;
        pairable = true;
        std::sort(values.begin(), values.end());
        const double w = 1.0 / static_cast<double>(m - 1);
        for (size_t a = 0; a < m; ++a)
            for (size_t b = 0; b < m; ++b) {
                if (a == b) continue;
                o[values[a]][values[b]] += w;
            }
        for (const auto& v : values) {
            totals[v] += 1.0;
            n += 1.0;
        }
    }
    if (!pairable) throw Error("krippendorff_alpha_nominal: nothing pairable");

    double disagree = 0.0;
    for (const auto& [c, row] : o)
        for (const auto& [k, v] : row)
            if (c != k) disagree += v;
    double expected = 0.0;
    for (const auto& [c, nc] : totals)
        for (const auto& [k, nk] : totals)
            if (c != k) expected += nc * nk;

    const double d_o = disagree / n;
    const double d_e = expected / (n * (n - 1.0));
    if (d_e == 0.0) {
        if (d_o == 0.0) return 1.0; // single value everywhere: perfect agreement
        throw Error("krippendorff_alpha_nominal: zero expected disagreement");
    }
    return 1.0 - d_o / d_e;
}

double krippendorff_alpha_unitized(const std::vector<Continuum>& continua) {
    if (continua.empty()) throw Error("krippendorff_alpha_unitized: no continua");

    double observed = 0.0;
    double expected = 0.0;
    std::int64_t total_length = 0;

    for (const auto& c : continua) {
        if (c.unitizations.size() < 2)
            throw Error("continuum '" + c.doc_id + "': need >= 2 annotators, got " +
                        std::to_string(c.unitizations.size()));
        if (c.length <= 0) throw Error("continuum '" + c.doc_id + "': non-positive length");
        total_length += c.length;

        std::vector<std::vector<Section>> partitions;
        partitions.reserve(c.unitizations.size());
        for (const auto& [annotator, spans] : c.unitizations)
            partitions.push_back(decompose(spans, c.length, annotator, c.doc_id));
        const size_t m = partitions.size();

        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                for (const auto& u : partitions[i]) {
                    if (!u.relevant) continue;
                    for (const auto& v : partitions[j]) observed += unit_distance(u, v);
                }
            }

        // Expected disagreement: pool all sections of the continuum and pair
        // every relevant unit with every other pooled section under random
        // placement. The (m-1)/m factor matches the observed statistic,
        // where each relevant unit meets m-1 of the m partitions.
        std::vector<Section> pool;
        for (const auto& part : partitions) pool.insert(pool.end(), part.begin(), part.end());
        double e_sum = 0.0;
        for (size_t a = 0; a < pool.size(); ++a) {
            if (!pool[a].relevant) continue;
            for (size_t b = 0; b < pool.size(); ++b) {
                if (a == b) continue;
                if (pool[b].relevant)
                    e_sum += expected_relevant_pair(pool[a].len(), pool[b].len(), c.length);
                else
                    e_sum += static_cast<double>(pool[a].len()) *
                             static_cast<double>(pool[a].len()) *
                             expected_gap_pair(pool[a].len(), pool[b].len(), c.length);
            }
        }
        expected += e_sum * (static_cast<double>(m - 1) / static_cast<double>(m));
    }

    if (total_length <= 0) throw Error("krippendorff_alpha_unitized: zero total length");
    if (expected == 0.0) {
        if (observed == 0.0)
            throw Error("krippendorff_alpha_unitized: no relevant units to compare");
        throw Error("krippendorff_alpha_unitized: zero expected disagreement");
    }
    return 1.0 - observed / expected;
}

std::vector<Continuum> load_continua(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::map<std::string, Continuum> by_doc;
    std::vector<std::string> order;
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (text::trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(path + ": row " + std::to_string(row) + ": invalid JSON: " + e.what());
        }
        try {
            const auto doc_id = obj.at("docId").get<std::string>();
            const auto length = obj.at("length").get<std::int64_t>();
            const auto annotator = obj.at("annotator").get<std::string>();
            auto& cont = by_doc[doc_id];
            if (cont.doc_id.empty()) {
                cont.doc_id = doc_id;
                cont.length = length;
                order.push_back(doc_id);
            } else if (cont.length != length) {
                throw Error(path + ": row " + std::to_string(row) + ": length mismatch for doc '" +
                            doc_id + "'");
            }
            if (cont.unitizations.count(annotator))
                throw Error(path + ": row " + std::to_string(row) + ": duplicate annotator '" +
                            annotator + "' for doc '" + doc_id + "'");
            std::vector<Span> spans;
            for (const auto& s : obj.at("spans"))
                spans.emplace_back(s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>());
            cont.unitizations[annotator] = std::move(spans);
        } catch (const json::exception& e) {
            throw Error(path + ": row " + std::to_string(row) + ": " + e.what());
        }
    }
    std::vector<Continuum> out;
    out.reserve(order.size());
    for (const auto& id : order) out.push_back(std::move(by_doc[id]));
    return out;
}

void save_continua(const std::vector<Continuum>& continua, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    for (const auto& c : continua) {
        for (const auto& [annotator, spans] : c.unitizations) {
            json arr = json::array();
            for (const auto& [s, e] : spans) arr.push_back({s, e});
            const json obj = {
                {"docId", c.doc_id}, {"length", c.length}, {"annotator", annotator}, {"spans", arr}};
            out << obj.dump() << "\n";
        }
    }
    if (!out) throw Error("write failed: " + path);
}

} // namespace arct::agreement
