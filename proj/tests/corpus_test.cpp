#include "arct/corpus.hpp"

#include <set>

#include "arct/error.hpp"
#include "arct/random.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace arct;
using corpus::TaskInstance;
using testsupport::TempDir;

namespace {

const char* kHeader = "id\twarrant0\twarrant1\tlabel\treason\tclaim\tdebateTitle\tdebateInfo\n";

TaskInstance make_instance(const std::string& id) {
    TaskInstance inst;
    inst.instance_id = id;
    inst.warrant0 = "w zero " + id;
    inst.warrant1 = "w one " + id;
    inst.label = 1;
    inst.reason = "reason " + id;
    inst.claim = "claim " + id;
    inst.debate_title = "title";
    inst.debate_info = "info";
    return inst;
}

} // namespace

TEST_CASE("load_instances: header-only file yields empty list") {
    TempDir dir;
    dir.write("empty.tsv", kHeader);
    CHECK(corpus::load_instances(dir.file("empty.tsv"), corpus::InstanceFormat::Tsv).empty());
}

TEST_CASE("load_instances: three-row fixture keeps file order") {
    TempDir dir;
    dir.write("three.tsv", std::string(kHeader) +
                               "i1\tw0a\tw1a\t0\tra\tca\tta\tda\n"
                               "i2\tw0b\tw1b\t1\trb\tcb\ttb\tdb\n"
                               "i3\tw0c\tw1c\t0\trc\tcc\ttc\tdc\n");
    const auto insts = corpus::load_instances(dir.file("three.tsv"), corpus::InstanceFormat::Tsv);
    REQUIRE(insts.size() == 3);
    CHECK(insts[0].instance_id == "i1");
    CHECK(insts[1].instance_id == "i2");
    CHECK(insts[2].instance_id == "i3");
    CHECK(insts[1].label == 1);
    CHECK(insts[2].reason == "rc");
}

TEST_CASE("load_instances: label 2 rejected with row-indexed error") {
    TempDir dir;
    dir.write("bad.tsv", std::string(kHeader) + "i1\tw0\tw1\t2\tr\tc\tt\td\n");
    CHECK_THROWS_WITH_AS(corpus::load_instances(dir.file("bad.tsv"), corpus::InstanceFormat::Tsv),
                         doctest::Contains("row 2"), Error);
}

TEST_CASE("load_instances: duplicate id rejected") {
    TempDir dir;
    dir.write("dup.tsv", std::string(kHeader) + "i1\ta\tb\t0\tr\tc\tt\td\ni1\ta\tb\t0\tr\tc\tt\td\n");
    CHECK_THROWS_WITH_AS(corpus::load_instances(dir.file("dup.tsv"), corpus::InstanceFormat::Tsv),
                         doctest::Contains("duplicate"), Error);
}

TEST_CASE("load_instances: wrong column count names the row") {
    TempDir dir;
    dir.write("cols.tsv", std::string(kHeader) + "i1\ta\tb\t0\tr\tc\tt\n");
    CHECK_THROWS_WITH_AS(corpus::load_instances(dir.file("cols.tsv"), corpus::InstanceFormat::Tsv),
                         doctest::Contains("row 2"), Error);
}

TEST_CASE("instance round trip is identity on all fields") {
    TempDir dir;
    Rng rng(11);
    std::vector<TaskInstance> insts;
    for (int i = 0; i < 20; ++i) {
        auto inst = make_instance("inst" + std::to_string(i));
        inst.label = rng.coin() ? 1 : 0;
        if (i % 3 == 0) inst.reason += " \"quoted\" and, commas";
        insts.push_back(inst);
    }
    for (const auto format : {corpus::InstanceFormat::Tsv, corpus::InstanceFormat::Jsonl}) {
        const auto path = dir.file(format == corpus::InstanceFormat::Tsv ? "r.tsv" : "r.jsonl");
        corpus::save_instances(insts, path, format);
        const auto loaded = corpus::load_instances(path, format);
        REQUIRE(loaded.size() == insts.size());
        for (size_t i = 0; i < insts.size(); ++i) {
            CHECK(loaded[i].instance_id == insts[i].instance_id);
            CHECK(loaded[i].warrant0 == insts[i].warrant0);
            CHECK(loaded[i].warrant1 == insts[i].warrant1);
            CHECK(loaded[i].label == insts[i].label);
            CHECK(loaded[i].reason == insts[i].reason);
            CHECK(loaded[i].claim == insts[i].claim);
            CHECK(loaded[i].debate_title == insts[i].debate_title);
            CHECK(loaded[i].debate_info == insts[i].debate_info);
        }
    }
}

TEST_CASE("jsonl round trip survives tabs and newlines in text") {
    TempDir dir;
    auto inst = make_instance("weird");
    inst.reason = "line one\nline two\tand a tab";
    corpus::save_instances({inst}, dir.file("w.jsonl"), corpus::InstanceFormat::Jsonl);
    const auto loaded = corpus::load_instances(dir.file("w.jsonl"), corpus::InstanceFormat::Jsonl);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].reason == inst.reason);
}

TEST_CASE("tsv save rejects embedded tabs") {
    TempDir dir;
    auto inst = make_instance("tabbed");
    inst.claim = "has\ttab";
    CHECK_THROWS_AS(corpus::save_instances({inst}, dir.file("t.tsv"), corpus::InstanceFormat::Tsv),
                    Error);
}

TEST_CASE("split_by_year: 2014/2016/2017 fixture gives (2,2,2)") {
    std::map<std::string, corpus::Debate> debates;
    debates["d14"] = {"d14", "t", "d", 2014};
    debates["d16"] = {"d16", "t", "d", 2016};
    debates["d17"] = {"d17", "t", "d", 2017};
    std::vector<TaskInstance> insts;
    int n = 0;
    for (const auto& [id, debate] : debates) {
        for (int i = 0; i < 2; ++i) {
            auto inst = make_instance("i" + std::to_string(n++));
            inst.debate_id = id;
            insts.push_back(inst);
        }
    }
    const auto split = corpus::split_by_year(insts, debates);
    CHECK(split.train.size() == 2);
    CHECK(split.dev.size() == 2);
    CHECK(split.test.size() == 2);
}

TEST_CASE("split_by_year: empty input gives three empty lists") {
    const auto split = corpus::split_by_year({}, {});
    CHECK(split.train.empty());
    CHECK(split.dev.empty());
    CHECK(split.test.empty());
}

TEST_CASE("split_by_year partitions its input") {
    std::map<std::string, corpus::Debate> debates;
    Rng rng(7);
    for (int d = 0; d < 12; ++d) {
        const std::string id = "d" + std::to_string(d);
        debates[id] = {id, "t", "d", 2010 + static_cast<int>(rng.below(12))};
    }
    std::vector<TaskInstance> insts;
    for (int i = 0; i < 60; ++i) {
        auto inst = make_instance("i" + std::to_string(i));
        inst.debate_id = "d" + std::to_string(rng.below(12));
        insts.push_back(inst);
    }
    const auto split = corpus::split_by_year(insts, debates);
    CHECK(split.train.size() + split.dev.size() + split.test.size() == insts.size());
    std::set<std::string> seen;
    for (const auto* part : {&split.train, &split.dev, &split.test})
        for (const auto& inst : *part) CHECK(seen.insert(inst.instance_id).second);
}

TEST_CASE("split_by_year: years after 2017 go to test") {
    std::map<std::string, corpus::Debate> debates;
    debates["future"] = {"future", "t", "d", 2030};
    auto inst = make_instance("i0");
    inst.debate_id = "future";
    const auto split = corpus::split_by_year({inst}, debates);
    CHECK(split.test.size() == 1);
}

TEST_CASE("split_by_year: unresolved debate id is an error") {
    auto inst = make_instance("i0");
    inst.debate_id = "missing";
    CHECK_THROWS_WITH_AS(corpus::split_by_year({inst}, {}), doctest::Contains("missing"), Error);
}

TEST_CASE("validate_instance") {
    CHECK(corpus::validate_instance(make_instance("ok")).empty());

    auto dup = make_instance("dup");
    dup.warrant1 = dup.warrant0;
    const auto v1 = corpus::validate_instance(dup);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0] == "duplicate warrants");

    auto blank = make_instance("blank");
    blank.reason.clear();
    const auto v2 = corpus::validate_instance(blank);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0] == "empty field: reason");

    auto bad_label = make_instance("bad");
    bad_label.label = 7;
    CHECK(corpus::validate_instance(bad_label) ==
          std::vector<std::string>{"label out of range"});
}

TEST_CASE("validate_instance accepts exactly what load_instances emits") {
    TempDir dir;
    dir.write("ok.tsv", std::string(kHeader) + "i1\tw0\tw1\t0\tr\tc\tt\td\n");
    for (const auto& inst : corpus::load_instances(dir.file("ok.tsv"), corpus::InstanceFormat::Tsv))
        CHECK(corpus::validate_instance(inst).empty());
}

TEST_CASE("debate file round trip and validation") {
    TempDir dir;
    std::vector<corpus::Debate> debates = {{"d1", "Title one", "Info", 2015},
                                           {"d2", "Title two", "", 2017}};
    corpus::save_debates(debates, dir.file("d.tsv"));
    const auto loaded = corpus::load_debates(dir.file("d.tsv"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded.at("d1").year == 2015);
    CHECK(loaded.at("d2").title == "Title two");

    dir.write("bad.tsv", "debateId\tyear\ttitle\tdescription\nd1\t1800\tT\tD\n");
    CHECK_THROWS_WITH_AS(corpus::load_debates(dir.file("bad.tsv")),
                         doctest::Contains("year out of range"), Error);
}
