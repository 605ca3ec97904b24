#include "arct/reliability.hpp"

#include <set>

#include "arct/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace arct;
using crowd::WorkerResponse;
using testsupport::simulate_crowd;

namespace {

WorkerResponse resp(const std::string& item, const std::string& worker, const std::string& label,
                    double t) {
    return WorkerResponse{item, worker, 1600000000.0 + t, label};
}

} // namespace

TEST_CASE("split_by_submission_time: 18 responses split 9+9 by time") {
    const auto responses = simulate_crowd(3, 18, 0.9, 1);
    const auto [a, b] = reliability::split_by_submission_time(responses);
    CHECK(a.size() == 3 * 9);
    CHECK(b.size() == 3 * 9);
    for (const auto& r : a) CHECK(r.worker_id <= "w008"); // earliest nine workers
    for (const auto& r : b) CHECK(r.worker_id >= "w009");
}

TEST_CASE("split_by_submission_time: identical timestamps fall back to worker id") {
    const std::vector<WorkerResponse> responses = {
        resp("i", "wb", "A", 5.0), resp("i", "wa", "B", 5.0), resp("i", "wd", "A", 5.0),
        resp("i", "wc", "B", 5.0)};
    const auto [a, b] = reliability::split_by_submission_time(responses);
    REQUIRE(a.size() == 2);
    CHECK(a[0].worker_id == "wa");
    CHECK(a[1].worker_id == "wb");
    CHECK(b[0].worker_id == "wc");
    CHECK(b[1].worker_id == "wd");
}

TEST_CASE("split_by_submission_time: four responses split 2+2 in sorted order") {
    const std::vector<WorkerResponse> responses = {
        resp("i", "w1", "A", 4.0), resp("i", "w2", "B", 1.0), resp("i", "w3", "A", 3.0),
        resp("i", "w4", "B", 2.0)};
    const auto [a, b] = reliability::split_by_submission_time(responses);
    REQUIRE(a.size() == 2);
    CHECK(a[0].worker_id == "w2");
    CHECK(a[1].worker_id == "w4");
    CHECK(b[0].worker_id == "w3");
    CHECK(b[1].worker_id == "w1");
}

TEST_CASE("split_by_submission_time: odd count names the item") {
    const std::vector<WorkerResponse> responses = {
        resp("odd_item", "w1", "A", 1.0), resp("odd_item", "w2", "A", 2.0),
        resp("odd_item", "w3", "A", 3.0)};
    CHECK_THROWS_WITH_AS(reliability::split_by_submission_time(responses),
                         doctest::Contains("odd_item"), Error);
}

TEST_CASE("split is a partition of the responses") {
    const auto responses = simulate_crowd(5, 6, 0.7, 2);
    const auto [a, b] = reliability::split_by_submission_time(responses);
    CHECK(a.size() + b.size() == responses.size());
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto* group : {&a, &b})
        for (const auto& r : *group) CHECK(seen.emplace(r.item_id, r.worker_id).second);
    CHECK(seen.size() == responses.size());
}

TEST_CASE("reliability_curve: perfect workers give kappa 1 with zero std") {
    const auto responses = simulate_crowd(30, 6, 1.0, 3);
    crowd::AggregationConfig cfg;
    cfg.seed = 7;
    cfg.restarts = 2;
    cfg.em_iterations = 20;
    const auto points = reliability::reliability_curve(responses, {1, 3}, {1.0}, 3, cfg);
    REQUIRE(points.size() == 2);
    for (const auto& p : points) {
        CHECK(p.mean_kappa == doctest::Approx(1.0));
        CHECK(p.std_kappa == doctest::Approx(0.0));
        CHECK(p.mean_coverage == doctest::Approx(1.0));
        CHECK(p.repeats == 3);
        CHECK(p.skipped == 0);
    }
}

TEST_CASE("reliability_curve: deterministic for a fixed seed") {
    const auto responses = simulate_crowd(12, 6, 0.8, 4);
    crowd::AggregationConfig cfg;
    cfg.seed = 11;
    cfg.restarts = 2;
    cfg.em_iterations = 15;
    const auto a = reliability::reliability_curve(responses, {1, 2}, {0.9, 1.0}, 2, cfg);
    const auto b = reliability::reliability_curve(responses, {1, 2}, {0.9, 1.0}, 2, cfg);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_kappa == b[i].mean_kappa);
        CHECK(a[i].std_kappa == b[i].std_kappa);
        CHECK(a[i].mean_coverage == b[i].mean_coverage);
    }
}

TEST_CASE("reliability_curve: grid shape and coverage bounds") {
    const auto responses = simulate_crowd(10, 6, 0.9, 5);
    crowd::AggregationConfig cfg;
    cfg.seed = 13;
    cfg.restarts = 2;
    cfg.em_iterations = 15;
    const auto points = reliability::reliability_curve(responses, {1, 2, 3}, {0.5, 1.0}, 2, cfg);
    CHECK(points.size() == 3 * 2);
    for (const auto& p : points) {
        CHECK(p.mean_coverage <= p.keep_fraction + 0.1 + 1e-12); // ceil rule, n = 10
        CHECK(p.mean_coverage >= 0.0);
    }
}

TEST_CASE("reliability_curve: k larger than the group size is an error") {
    const auto responses = simulate_crowd(4, 6, 0.9, 6); // group size 3
    crowd::AggregationConfig cfg;
    cfg.seed = 1;
    CHECK_THROWS_WITH_AS(reliability::reliability_curve(responses, {4}, {1.0}, 2, cfg),
                         doctest::Contains("per-group size"), Error);
}

TEST_CASE("reliability_curve: bad fractions and repeats are errors") {
    const auto responses = simulate_crowd(4, 6, 0.9, 6);
    crowd::AggregationConfig cfg;
    CHECK_THROWS_AS(reliability::reliability_curve(responses, {1}, {0.0}, 2, cfg), Error);
    CHECK_THROWS_AS(reliability::reliability_curve(responses, {1}, {1.0}, 0, cfg), Error);
}

TEST_CASE("curve csv and svg outputs") {
    testsupport::TempDir dir;
    const auto responses = simulate_crowd(10, 6, 1.0, 8);
    crowd::AggregationConfig cfg;
    cfg.seed = 3;
    cfg.restarts = 2;
    cfg.em_iterations = 10;
    const auto points = reliability::reliability_curve(responses, {1, 2}, {0.9, 1.0}, 2, cfg);
    reliability::save_curve_csv(points, dir.file("curve.csv"));
    const auto csv = testsupport::read_file(dir.file("curve.csv"));
    CHECK(csv.rfind("k,keep_fraction,mean_kappa,std_kappa,mean_coverage,repeats\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4);

    reliability::save_curve_svg(points, dir.file("curve.svg"));
    const auto svg = testsupport::read_file(dir.file("curve.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
