#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "tfed/errors.hpp"
#include "tfed/data.hpp"
#include "tfed/stationary.hpp"

using namespace tfed;
using namespace tfed::data;

namespace {

std::string write_temp(const std::string& text) {
    static int counter = 0;
    const auto path = std::filesystem::temp_directory_path() /
                      ("tfed_test_" + std::to_string(counter++) + ".csv");
    std::ofstream out(path);
    out << text;
    return path.string();
}

// Fixture records: classes x runs, each run `samples` long, feature values
// encoding (class, run, sample) so provenance is checkable.
std::vector<SimulationRecord> fixture(const std::vector<int>& classes, int runs, int samples,
                                      int n_features = 2) {
    std::vector<SimulationRecord> records;
    for (int cls : classes)
        for (int run = 1; run <= runs; ++run)
            for (int s = 1; s <= samples; ++s) {
                SimulationRecord r;
                r.fault_class = cls;
                r.simulation_run = run;
                r.sample_index = s;
                for (int f = 0; f < n_features; ++f)
                    r.features.push_back(cls * 10000 + run * 100 + s + f * 0.5);
                records.push_back(r);
            }
    return records;
}

}  // namespace

TEST_CASE("ingest_csv parses a well-formed fixture in order") {
    const auto path = write_temp(
        "faultNumber,simulationRun,sample,x1,x2\n"
        "0,1,2,1.5,2.5\n"
        "0,1,1,0.5,1.0\n"
        "1,1,1,9.0,8.0\n");
    const auto records = ingest_csv(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].sample_index == 1);  // sorted by (class, run, sample)
    CHECK(records[0].features == std::vector<double>{0.5, 1.0});
    CHECK(records[2].fault_class == 1);
    std::remove(path.c_str());
}

TEST_CASE("ingest_csv errors name the offending line") {
    const auto short_row = write_temp(
        "faultNumber,simulationRun,sample,x1,x2\n"
        "0,1,1,0.5\n");
    CHECK_THROWS_WITH_AS(ingest_csv(short_row), doctest::Contains("line 2"), ParseError);
    std::remove(short_row.c_str());

    const auto bad_cell = write_temp(
        "faultNumber,simulationRun,sample,x1\n"
        "0,1,1,abc\n");
    CHECK_THROWS_AS(ingest_csv(bad_cell), ParseError);
    std::remove(bad_cell.c_str());

    const auto missing = write_temp("foo,bar,baz\n1,2,3\n");
    CHECK_THROWS_WITH_AS(ingest_csv(missing), doctest::Contains("faultNumber"), ParseError);
    std::remove(missing.c_str());
}

TEST_CASE("ingest groups runs x classes into segments after the recipe") {
    auto records = fixture({0, 1}, 2, 30);
    SplitRecipe recipe;
    recipe.train_runs_per_class = 1;
    recipe.val_runs_per_class = 0;
    recipe.test_runs_per_class = 1;
    recipe.drop_first = 5;
    recipe.test_keep_from = 11;
    recipe.test_keep_to = 30;
    recipe.removed_classes = {};
    const auto split = apply_split_recipe(records, recipe);
    CHECK(split.train.segment_keys.size() == 2);  // one run per class
    CHECK(split.test.segment_keys.size() == 2);
    CHECK(split.train.rows == 2 * 25);
    CHECK(split.test.rows == 2 * 20);
}

TEST_CASE("paper-style recipe arithmetic: 480 train, 340 test samples per run") {
    auto records = fixture({0}, 2, 960, 1);
    SplitRecipe recipe;
    recipe.train_runs_per_class = 1;
    recipe.val_runs_per_class = 0;
    recipe.test_runs_per_class = 1;
    recipe.removed_classes = {};
    // Training run of 500 samples: truncate the fixture's first run.
    std::vector<SimulationRecord> trimmed;
    for (const auto& r : records)
        if (r.simulation_run == 2 || r.sample_index <= 500) trimmed.push_back(r);
    const auto split = apply_split_recipe(trimmed, recipe);
    CHECK(split.train.rows == 480);  // 500 - 20
    CHECK(split.test.rows == 340);   // samples 161..500
}

TEST_CASE("classes 3, 9, 15 are removed and labels re-indexed densely") {
    auto records = fixture({0, 1, 3, 9, 15, 16}, 2, 30);
    SplitRecipe recipe;
    recipe.train_runs_per_class = 1;
    recipe.val_runs_per_class = 0;
    recipe.test_runs_per_class = 1;
    recipe.drop_first = 2;
    recipe.test_keep_from = 3;
    recipe.test_keep_to = 30;
    const auto split = apply_split_recipe(records, recipe);
    CHECK(split.class_map == std::map<int, int>{{0, 0}, {1, 1}, {16, 2}});
    std::set<int> labels(split.train.labels.begin(), split.train.labels.end());
    CHECK(labels == std::set<int>{0, 1, 2});
    for (const auto& [cls, run] : split.train.segment_keys) {
        CHECK(cls != 3);
        CHECK(cls != 9);
        CHECK(cls != 15);
    }
}

TEST_CASE("scaler: hand-computed column and constant guard") {
    TabularDataset d;
    d.rows = 3;
    d.cols = 2;
    d.values = {2, 7, 4, 7, 6, 7};  // col0 = {2,4,6}, col1 constant
    d.labels = {0, 0, 0};
    const auto s = fit_scaler(d);
    CHECK(s.mean[0] == doctest::Approx(4.0));
    CHECK(s.stddev[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
    CHECK(s.stddev[1] == 1.0);  // guard
    const auto scaled = scale(d, s);
    CHECK(scaled.at(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(scaled.at(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(scaled.at(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));
    CHECK(scaled.at(0, 1) == 0.0);
}

TEST_CASE("test data is shifted by training statistics, not its own") {
    TabularDataset train;
    train.rows = 2;
    train.cols = 1;
    train.values = {0.0, 2.0};  // mean 1, std 1
    train.labels = {0, 0};
    const auto s = fit_scaler(train);
    TabularDataset test = train;
    test.values = {11.0, 13.0};
    const auto scaled = scale(test, s);
    CHECK(scaled.at(0, 0) == doctest::Approx(10.0));
    CHECK(scaled.at(1, 0) == doctest::Approx(12.0));
}

TEST_CASE("partition assigns runs round-robin and keeps splits disjoint") {
    auto records = fixture({0}, 50, 25, 1);
    SplitRecipe recipe;
    recipe.train_runs_per_class = 50;
    recipe.val_runs_per_class = 0;
    recipe.test_runs_per_class = 0;
    recipe.drop_first = 0;
    recipe.test_keep_from = 1;
    recipe.test_keep_to = 25;
    recipe.removed_classes = {};
    // Empty val/test are not representable; use a 3-way recipe instead.
    recipe.train_runs_per_class = 40;
    recipe.val_runs_per_class = 5;
    recipe.test_runs_per_class = 5;
    const auto split = apply_split_recipe(records, recipe);
    const auto result = partition(split, 5);
    REQUIRE(result.participants.size() == 5);
    // Participant k gets train runs {k+1, k+6, ...} (runs are 1-based here).
    for (std::size_t p = 0; p < 5; ++p) {
        const auto& keys = result.plan.participants[p].train;
        REQUIRE(keys.size() == 8);
        for (std::size_t i = 0; i < keys.size(); ++i)
            CHECK(keys[i].second == static_cast<int>(p + 1 + 5 * i));
    }
    // Disjointness across participants and splits.
    std::set<std::pair<int, std::pair<int, int>>> seen;  // (split, key)
    for (const auto& ps : result.plan.participants) {
        for (const auto& k : ps.train) CHECK(seen.insert({0, k}).second);
        for (const auto& k : ps.validation) CHECK(seen.insert({1, k}).second);
        for (const auto& k : ps.test) CHECK(seen.insert({2, k}).second);
    }
}

TEST_CASE("partition with one participant receives everything") {
    auto records = fixture({0, 1}, 4, 30);
    SplitRecipe recipe;
    recipe.train_runs_per_class = 2;
    recipe.val_runs_per_class = 1;
    recipe.test_runs_per_class = 1;
    recipe.drop_first = 2;
    recipe.test_keep_from = 3;
    recipe.test_keep_to = 30;
    recipe.removed_classes = {};
    const auto split = apply_split_recipe(records, recipe);
    const auto result = partition(split, 1);
    CHECK(result.participants[0].train.rows == split.train.rows);
}

TEST_CASE("shortfall errors name the class") {
    auto records = fixture({0, 1}, 9, 30);
    SplitRecipe recipe;
    recipe.train_runs_per_class = 10;
    recipe.val_runs_per_class = 0;
    recipe.test_runs_per_class = 0;
    recipe.removed_classes = {};
    CHECK_THROWS_WITH_AS(apply_split_recipe(records, recipe), doctest::Contains("class 0"),
                         ConfigError);
}

TEST_CASE("synthesizer determinism and stationarity of normal data") {
    SynthSpec spec;
    spec.n_features = 4;
    spec.n_classes = 1;
    spec.runs_per_class = 1;
    spec.samples_per_run = 500;
    spec.seed = 9;
    const auto a = synthesize(spec);
    const auto b = synthesize(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].features == b[i].features);

    // Without seasonal/trend components, AR(1) columns test stationary.
    int stationary_cols = 0;
    for (std::size_t f = 0; f < spec.n_features; ++f) {
        std::vector<double> col;
        for (const auto& r : a) col.push_back(r.features[f]);
        if (stationary::adf_test(col).is_stationary) ++stationary_cols;
    }
    CHECK(stationary_cols >= 3);
}

TEST_CASE("fault classes shift the feature distribution measurably") {
    SynthSpec spec;
    spec.n_features = 4;
    spec.n_classes = 2;
    spec.runs_per_class = 10;
    spec.samples_per_run = 200;
    spec.fault_shift_sigma = 5.0;
    spec.seed = 4;
    const auto records = synthesize(spec);

    // Two-sample mean gap per feature, post-onset rows only.
    double best_gap = 0.0;
    for (std::size_t f = 0; f < spec.n_features; ++f) {
        double m0 = 0, m1 = 0, v0 = 0;
        std::size_t c0 = 0, c1 = 0;
        for (const auto& r : records) {
            if (r.sample_index <= static_cast<int>(spec.onset_sample)) continue;
            if (r.fault_class == 0) {
                m0 += r.features[f];
                ++c0;
            } else {
                m1 += r.features[f];
                ++c1;
            }
        }
        m0 /= static_cast<double>(c0);
        m1 /= static_cast<double>(c1);
        for (const auto& r : records)
            if (r.fault_class == 0 && r.sample_index > static_cast<int>(spec.onset_sample))
                v0 += (r.features[f] - m0) * (r.features[f] - m0);
        const double sd0 = std::sqrt(v0 / static_cast<double>(c0));
        best_gap = std::max(best_gap, std::abs(m1 - m0) / sd0);
    }
    CHECK(best_gap > 3.0);
}

TEST_CASE("write_csv then ingest_csv round-trips records") {
    const auto records = fixture({0, 1}, 1, 5);
    const auto path = write_temp("");
    write_csv(path, records);
    const auto back = ingest_csv(path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].fault_class == records[i].fault_class);
        CHECK(back[i].features == records[i].features);
    }
    std::remove(path.c_str());
}
