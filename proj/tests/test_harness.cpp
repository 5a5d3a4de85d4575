// Copyright 2026 The haargof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "haargof/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace haargof {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("haargof_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    EXPECT_TRUE(in.good()) << "missing file " << p;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

long long line_count(const std::string& text) {
    long long c = 0;
    for (char ch : text)
        if (ch == '\n') ++c;
    return c;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.dim = 3;
    cfg.sample_size = 2;
    cfg.replicates = 10;
    cfg.sampler.kind = SamplerKind::kac;
    cfg.step_grid = {1, 2, 3};
    StatisticSpec ray;
    ray.id = "rayleigh";
    StatisticSpec gin;
    gin.id = "gine";
    cfg.statistics = {ray, gin};
    cfg.master_seed = 2026;
    return cfg;
}

TEST(Config, JsonRoundTripPreservesEveryField) {
    ExperimentConfig cfg;
    cfg.dim = 7;
    cfg.sample_size = 4;
    cfg.replicates = 6;
    cfg.sampler.kind = SamplerKind::jor;
    cfg.sampler.dim = 7;
    cfg.sampler.m1 = 2;
    cfg.sampler.m2 = 3;
    cfg.sampler.seed = 77;
    cfg.sampler.steps = 1;
    cfg.step_grid = {0, 2, 5};
    StatisticSpec a;
    a.id = "tz";
    a.z = 0.3;
    a.allow_det_minus = true;
    StatisticSpec b;
    b.id = "trace";
    b.trace_k = 4;
    b.with_pvalue = false;
    cfg.statistics = {a, b};
    cfg.master_seed = 77;
    cfg.out_dir = "somewhere";
    cfg.threads = 2;
    cfg.haar_reference_path = "ref_cache.txt";
    cfg.alpha = 0.1;
    cfg.histogram_bins = 12;

    nlohmann::json j = cfg;
    ExperimentConfig back = config_from_json_text(j.dump());
    EXPECT_TRUE(cfg == back);
}

TEST(Config, DefaultsAndFreshReferenceSpelling) {
    ExperimentConfig cfg = config_from_json_text("{}");
    EXPECT_EQ(cfg.dim, 25);
    EXPECT_EQ(cfg.sample_size, 100);
    EXPECT_EQ(cfg.replicates, 100);
    EXPECT_EQ(cfg.sampler.kind, SamplerKind::kac);
    EXPECT_EQ(cfg.sampler.dim, 25);
    EXPECT_TRUE(cfg.haar_reference_path.empty());
    EXPECT_EQ(cfg.histogram_bins, 30);

    nlohmann::json j = cfg;
    EXPECT_EQ(j.at("haar_reference").get<std::string>(), "fresh");

    ExperimentConfig named =
        config_from_json_text("{\"haar_reference\": \"cache.txt\"}");
    EXPECT_EQ(named.haar_reference_path, "cache.txt");
}

TEST(Config, ParseFailuresRaiseIoErrors) {
    try {
        config_from_json_text("{not json");
        FAIL() << "expected throw";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::io);
    }
    EXPECT_THROW(read_config_file("/nonexistent/path/config.json"), Error);
}

TEST(EstimatePower, OrderStatisticCutoffContract) {
    std::vector<double> null_values(100);
    for (int i = 0; i < 100; ++i) null_values[static_cast<std::size_t>(i)] = i + 1;
    // cutoff = 95th smallest = 95; exactly {96..100} land strictly above.
    EXPECT_DOUBLE_EQ(estimate_power(null_values, null_values, 0.05), 0.05);
    std::vector<double> high(40, 1000.0);
    EXPECT_DOUBLE_EQ(estimate_power(high, null_values, 0.05), 1.0);
    std::vector<double> low(40, -5.0);
    EXPECT_DOUBLE_EQ(estimate_power(low, null_values, 0.05), 0.0);
    EXPECT_THROW(estimate_power({}, null_values, 0.05), Error);
    EXPECT_THROW(estimate_power(high, null_values, 0.0), Error);
}

TEST(Sweep, ZeroStepWalkScoresExactDimensionSquare) {
    // A zero-step walk emits the identity, where the location statistic is
    // exactly n^2 * N for every replicate.
    ExperimentConfig cfg;
    cfg.dim = 5;
    cfg.sample_size = 1;
    cfg.replicates = 3;
    cfg.sampler.kind = SamplerKind::kac;
    cfg.step_grid = {0};
    StatisticSpec ray;
    ray.id = "rayleigh";
    cfg.statistics = {ray};
    cfg.master_seed = 11;
    SweepReport report = run_sweep(cfg);
    ASSERT_EQ(report.cells.size(), 1u);
    ASSERT_EQ(report.cells[0].values.size(), 3u);
    for (double v : report.cells[0].values) EXPECT_DOUBLE_EQ(v, 25.0);

    cfg.sample_size = 4;
    report = run_sweep(cfg);
    for (double v : report.cells[0].values) EXPECT_DOUBLE_EQ(v, 100.0);
    ASSERT_TRUE(report.cells[0].ad.has_value());
    EXPECT_TRUE(std::isfinite(report.cells[0].power));
}

TEST(Sweep, CellLayoutAndArtifactRowCounts) {
    ExperimentConfig cfg = small_config();
    fs::path dir = fresh_dir("rows");
    cfg.out_dir = dir.string();
    SweepReport report = run_sweep(cfg);
    ASSERT_EQ(report.cells.size(), 6u);  // 3 steps x 2 statistics
    EXPECT_EQ(report.cells[0].step, 1);
    EXPECT_EQ(report.cells[0].statistic, "rayleigh");
    EXPECT_EQ(report.cells[1].statistic, "gine");
    EXPECT_EQ(report.cells[5].step, 3);
    for (const auto& cell : report.cells) {
        EXPECT_EQ(cell.values.size(), 10u);
        EXPECT_TRUE(cell.error.empty());
        ASSERT_TRUE(cell.ad.has_value());
    }
    emit_report(report);
    EXPECT_EQ(line_count(slurp(dir / "detail.csv")), 1 + 60);
    EXPECT_EQ(line_count(slurp(dir / "summary.csv")), 1 + 6);
    EXPECT_EQ(line_count(slurp(dir / "reference.csv")), 1 + 20);
    EXPECT_EQ(line_count(slurp(dir / "histograms.csv")), 1 + 6 * 30 * 2);
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "timings.csv"));
}

TEST(Sweep, ReRunsAndThreadCountsAreByteIdentical) {
    ExperimentConfig cfg = small_config();
    fs::path d1 = fresh_dir("rerun_a");
    fs::path d2 = fresh_dir("rerun_b");
    fs::path d3 = fresh_dir("rerun_c");
    cfg.out_dir = d1.string();
    cfg.threads = 1;
    emit_report(run_sweep(cfg));
    cfg.out_dir = d2.string();
    emit_report(run_sweep(cfg));
    cfg.out_dir = d3.string();
    cfg.threads = 3;
    emit_report(run_sweep(cfg));
    for (const char* name : {"detail.csv", "summary.csv", "histograms.csv", "reference.csv"}) {
        const std::string base = slurp(d1 / name);
        EXPECT_EQ(base, slurp(d2 / name)) << name << " differs across reruns";
        EXPECT_EQ(base, slurp(d3 / name)) << name << " differs across thread counts";
    }
}

TEST(Sweep, LabelsCarryStatisticParameters) {
    ExperimentConfig cfg = small_config();
    StatisticSpec tz;
    tz.id = "tz";
    tz.z = 0.5;
    StatisticSpec uq;
    uq.id = "uzq";
    uq.z = 0.2;
    uq.q = 0.4;
    StatisticSpec tr;
    tr.id = "trace";
    tr.trace_k = 2;
    cfg.statistics = {tz, uq, tr};
    EXPECT_EQ(cfg.statistics[0].label(), "tz[z=0.5]");
    EXPECT_EQ(cfg.statistics[1].label(), "uzq[z=0.2,q=0.4]");
    EXPECT_EQ(cfg.statistics[2].label(), "trace[k=2]");
}

TEST(ReferenceCache, RoundTripAndKeyMismatchRecompute) {
    fs::path dir = fresh_dir("cache");
    ExperimentConfig cfg;
    cfg.dim = 3;
    cfg.sample_size = 2;
    cfg.replicates = 5;
    StatisticSpec ray;
    ray.id = "rayleigh";
    cfg.statistics = {ray};
    cfg.master_seed = 5;
    cfg.haar_reference_path = (dir / "ref.txt").string();

    CohortValues first = reference_cohort_cached(cfg);
    ASSERT_TRUE(fs::exists(cfg.haar_reference_path));
    const std::string cached_once = slurp(cfg.haar_reference_path);

    CohortValues second = reference_cohort_cached(cfg);
    ASSERT_EQ(second.values.size(), first.values.size());
    EXPECT_EQ(second.values[0], first.values[0]);  // exact: loaded, not recomputed
    EXPECT_EQ(slurp(cfg.haar_reference_path), cached_once);

    // A different seed invalidates the key; the cache is rewritten.
    cfg.master_seed = 6;
    CohortValues third = reference_cohort_cached(cfg);
    EXPECT_NE(third.values[0], first.values[0]);
    EXPECT_NE(slurp(cfg.haar_reference_path), cached_once);

    // Corrupt cache content under a stale header is rejected and recomputed.
    {
        std::ofstream out(cfg.haar_reference_path, std::ios::trunc);
        out << "# not the key\n0 1.0\n";
    }
    CohortValues fourth = reference_cohort_cached(cfg);
    EXPECT_EQ(fourth.values[0], third.values[0]);
}

TEST(Sweep, StatisticErrorsAreRecordedNotFatal) {
    ExperimentConfig cfg;
    cfg.dim = 4;  // even dimension: the one-parameter kernel statistic rejects it
    cfg.sample_size = 2;
    cfg.replicates = 4;
    cfg.sampler.kind = SamplerKind::kac;
    cfg.step_grid = {1};
    StatisticSpec tz;
    tz.id = "tz";
    StatisticSpec ray;
    ray.id = "rayleigh";
    cfg.statistics = {tz, ray};
    cfg.master_seed = 3;
    fs::path dir = fresh_dir("errors");
    cfg.out_dir = dir.string();

    SweepReport report = run_sweep(cfg);
    ASSERT_EQ(report.cells.size(), 2u);
    EXPECT_FALSE(report.cells[0].error.empty());
    EXPECT_FALSE(report.cells[0].ad.has_value());
    EXPECT_TRUE(report.cells[0].values.empty());
    EXPECT_FALSE(report.reference_errors[0].empty());
    EXPECT_TRUE(report.cells[1].error.empty());
    ASSERT_TRUE(report.cells[1].ad.has_value());

    emit_report(report);
    const std::string summary = slurp(dir / "summary.csv");
    EXPECT_NE(summary.find("nan,nan,nan"), std::string::npos);
    // The failing statistic contributes no histogram rows.
    const std::string hist = slurp(dir / "histograms.csv");
    EXPECT_EQ(hist.find("tz[z=0.5]"), std::string::npos);
    EXPECT_NE(hist.find("rayleigh"), std::string::npos);
    // report.json still carries the error text for the failed cell.
    const std::string json_text = slurp(dir / "report.json");
    EXPECT_NE(json_text.find("\"error\""), std::string::npos);
}

TEST(Sweep, UnknownStatisticIdIsReportedPerCell) {
    ExperimentConfig cfg = small_config();
    StatisticSpec bogus;
    bogus.id = "bogus";
    cfg.statistics = {bogus};
    cfg.step_grid = {1};
    SweepReport report = run_sweep(cfg);
    ASSERT_EQ(report.cells.size(), 1u);
    EXPECT_NE(report.cells[0].error.find("unknown statistic"), std::string::npos);
}

TEST(Sweep, EmptyGridRejected) {
    ExperimentConfig cfg = small_config();
    cfg.step_grid = {};
    EXPECT_THROW(run_sweep(cfg), Error);
}

}  // namespace
}  // namespace haargof
