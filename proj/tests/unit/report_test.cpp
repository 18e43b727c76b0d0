// Copyright 2026 The MaestroCut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <maestrocut/errors.hpp>
#include <maestrocut/report.hpp>
#include <maestrocut/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace maestrocut;
using namespace maestrocut::report;

TEST(Bootstrap, ConstantSampleHasDegenerateInterval) {
    const std::vector<double> xs(20, 3.5);
    const auto ci = bootstrap_ci(xs, Statistic::Mean);
    EXPECT_EQ(ci.value, 3.5);
    EXPECT_EQ(ci.lower, 3.5);
    EXPECT_EQ(ci.upper, 3.5);
    EXPECT_EQ(ci.resamples, kDefaultResamples);
    EXPECT_EQ(kDefaultResamples, 10000);
    const std::vector<double> one = {1.0};
    EXPECT_THROW((void)bootstrap_ci(one, Statistic::Mean), DomainError);
}

TEST(Bootstrap, CoversTheMeanOfNormalSamples) {
    Rng rng(11);
    int covered = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> xs;
        for (int i = 0; i < 40; ++i) {
            xs.push_back(rng.normal(2.0, 1.0));
        }
        const auto ci = bootstrap_ci(xs, Statistic::Mean, 1000, 0.95, static_cast<std::uint64_t>(t));
        EXPECT_LE(ci.lower, ci.value);
        EXPECT_GE(ci.upper, ci.value);
        covered += ci.lower <= 2.0 && 2.0 <= ci.upper ? 1 : 0;
    }
    // Percentile intervals at n = 40 undercover slightly; 0.95 +- 3 SE.
    EXPECT_GE(covered, 180);
}

TEST(Csv, RoundTripIsExact) {
    std::vector<MetricRow> rows = {
        {"tier1", "TFIM", "TopoGP", 3, "contraction", 0.1 + 0.2, "ratio"},
        {"tier1", "TFIM", "TopoGP", 1, "contraction", 1.0 / 3.0, "ratio"},
        {"tier2", "Baseline", "-", 0, "ttfr_ms", 171.25, "ms"},
    };
    normalise(rows);
    EXPECT_EQ(rows[0].seed, 1U);
    const auto text = to_csv(rows);
    EXPECT_EQ(parse_csv(text), rows);
    EXPECT_EQ(to_csv(parse_csv(text)), text);
}

TEST(Csv, HeaderOnlyAndErrors) {
    const std::string empty = to_csv({});
    EXPECT_EQ(empty.substr(0, empty.find('\n')), kCsvHeader);
    EXPECT_TRUE(parse_csv(empty).empty());
    EXPECT_THROW((void)parse_csv("a,b\n"), ParseError);
    EXPECT_THROW((void)parse_csv(std::string(kCsvHeader) + "\ntier1,x\n"), ParseError);
    std::vector<MetricRow> dup = {{"tier1", "a", "p", 0, "m", 1.0, ""},
                                  {"tier1", "a", "p", 0, "m", 2.0, ""}};
    EXPECT_THROW(normalise(dup), DomainError);
}

TEST(Io, ReadMissingFileThrows) {
    EXPECT_THROW((void)read_text("/nonexistent/maestrocut/file.csv"), IoError);
}

namespace {

std::vector<MetricRow> tier1_rows(double contraction) {
    std::vector<MetricRow> rows;
    for (std::uint64_t s = 0; s < 5; ++s) {
        rows.push_back({"tier1", "QAOA-MaxCut", "TopoGP", s, "contraction", contraction, "ratio"});
    }
    return rows;
}

std::vector<MetricRow> tier2_rows(double overhead) {
    std::vector<MetricRow> rows;
    for (const char *sc : {"Baseline", "Noisy", "Bursty", "Adversarial"}) {
        for (std::uint64_t s = 0; s < 30; ++s) {
            rows.push_back({"tier2", sc, "-", s, "jitter_ms", 30.0, "ms"});
            rows.push_back({"tier2", sc, "-", s, "ttfr_ms", 180.0, "ms"});
            rows.push_back({"tier2", sc, "-", s, "success_fraction", 0.99, ""});
            rows.push_back({"tier2", sc, "-", s, "timeout_fraction", 0.0, ""});
            rows.push_back({"tier2", sc, "-", s, "error_fraction", 0.01, ""});
            rows.push_back({"tier2", sc, "-", s, "phasepad_overhead", overhead, ""});
        }
    }
    return rows;
}

Status status_of(const std::vector<DashboardEntry> &entries, const std::string &metric) {
    for (const auto &e : entries) {
        if (e.metric == metric) {
            return e.status;
        }
    }
    return Status::Missing;
}

} // namespace

TEST(Dashboard, ContractionTargetIsInclusive) {
    DashboardSpec spec;
    spec.resamples = 200;
    const auto t2 = tier2_rows(0.01);
    auto good = dashboard(tier1_rows(0.55), t2, spec);
    EXPECT_TRUE(all_pass(good));
    EXPECT_EQ(good.size(), 2U + 4U * 5U);
    EXPECT_EQ(status_of(dashboard(tier1_rows(0.6), t2, spec), "contraction"), Status::Pass);
    EXPECT_EQ(status_of(dashboard(tier1_rows(0.61), t2, spec), "contraction"), Status::Fail);
}

TEST(Dashboard, OverheadAboveCapFails) {
    DashboardSpec spec;
    spec.resamples = 200;
    const auto entries = dashboard(tier1_rows(0.5), tier2_rows(0.012), spec);
    EXPECT_EQ(status_of(entries, "phasepad_overhead"), Status::Fail);
    EXPECT_FALSE(all_pass(entries));
}

TEST(Dashboard, AbsentRowsAreMissingAndNeverPass) {
    DashboardSpec spec;
    spec.resamples = 200;
    const auto entries = dashboard({}, tier2_rows(0.0), spec);
    EXPECT_EQ(entries.front().status, Status::Missing);
    EXPECT_FALSE(entries.front().estimate.has_value());
    EXPECT_FALSE(all_pass(entries));
    const auto json = dashboard_json(entries);
    EXPECT_NE(json.find("\"missing\": true"), std::string::npos);
}

TEST(Emit, WritesThreeFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "maestrocut_emit_test";
    std::filesystem::remove_all(dir);
    DashboardSpec spec;
    spec.resamples = 50;
    const auto t1 = tier1_rows(0.5);
    const auto t2 = tier2_rows(0.01);
    const auto entries = dashboard(t1, t2, spec);
    emit(t1, t2, entries, dir);
    for (const char *f : {"tier1_metrics.csv", "tier2_metrics.csv", "dashboard.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    EXPECT_EQ(parse_csv(read_text(dir / "tier1_metrics.csv")).size(), t1.size());
    std::filesystem::remove_all(dir);
}
