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
#include <maestrocut/stats.hpp>
#include <maestrocut/tier2.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace maestrocut;
using namespace maestrocut::tier2;

namespace {

ScenarioConfig scenario(const std::string &name) {
    for (const auto &s : default_scenarios()) {
        if (s.name == name) {
            return s;
        }
    }
    throw std::runtime_error("missing scenario " + name);
}

std::vector<double> column(const std::vector<RunMetrics> &runs, double RunMetrics::*field) {
    std::vector<double> out;
    for (const auto &r : runs) {
        out.push_back(r.*field);
    }
    return out;
}

} // namespace

TEST(Scenarios, FourNamedDefaults) {
    const auto all = default_scenarios();
    ASSERT_EQ(all.size(), 4U);
    EXPECT_EQ(all[0].name, "Baseline");
    for (const auto &s : all) {
        EXPECT_NO_THROW(s.validate());
    }
    auto bad = all[0];
    bad.servers = 0;
    EXPECT_THROW(bad.validate(), ConfigurationError);
}

TEST(Queue, EmptySystemLimit) {
    auto s = scenario("Baseline");
    s.arrival_rate = 0.05;
    s.service_cv = 0.0;
    s.duration_s = 400.0;
    s.error_rate = 0.0;
    const auto runs = simulate_queue(s, 5, 1);
    for (const auto &r : runs) {
        EXPECT_NEAR(r.ttfr_ms, s.service_mean_ms + s.result_latency_ms, 1e-6);
        EXPECT_NEAR(r.jitter_ms, 0.0, 1e-6);
    }
}

TEST(Queue, OutcomeFractionsPartition) {
    for (const auto &s : default_scenarios()) {
        for (const auto &r : simulate_queue(s, 5, 2, 0.01)) {
            EXPECT_NEAR(r.success_fraction + r.timeout_fraction + r.error_fraction, 1.0, 1e-12);
            EXPECT_DOUBLE_EQ(r.phasepad_overhead, 0.01);
            EXPECT_LE(r.qps_success, r.qps_raw);
        }
    }
}

TEST(Queue, AdversarialRaisesMedianTtfr) {
    const auto base = simulate_queue(scenario("Baseline"), 30, 3);
    const auto adv = simulate_queue(scenario("Adversarial"), 30, 3);
    EXPECT_GT(stats::median(column(adv, &RunMetrics::ttfr_ms)),
              stats::median(column(base, &RunMetrics::ttfr_ms)));
}

TEST(Queue, Deterministic) {
    const auto a = simulate_queue(scenario("Bursty"), 3, 4);
    const auto b = simulate_queue(scenario("Bursty"), 3, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].jitter_ms, b[i].jitter_ms);
        EXPECT_EQ(a[i].ttfr_ms, b[i].ttfr_ms);
    }
}

TEST(Sweep, SelfNormalisedAndBaselineCap) {
    const std::vector<double> levels = {0.0, 0.01};
    const auto rel = overhead_sweep(scenario("Baseline"), levels, 5, 10);
    EXPECT_DOUBLE_EQ(rel[0], 1.0);
    EXPECT_GE(rel[1], 0.98);
}

TEST(Slos, NeedThirtyEpisodes) {
    const auto runs = simulate_queue(scenario("Baseline"), 29, 6);
    EXPECT_THROW((void)evaluate_slos("Baseline", runs, {}), DomainError);
}

TEST(Slos, InclusiveTargets) {
    std::vector<RunMetrics> runs(30);
    for (auto &r : runs) {
        r.jitter_ms = 150.0;
        r.ttfr_ms = 220.0;
        r.success_fraction = 0.97;
        r.timeout_fraction = 0.005;
        r.error_fraction = 0.025;
    }
    for (const auto &e : evaluate_slos("Baseline", runs, {}, 200)) {
        EXPECT_EQ(e.status, report::Status::Pass) << e.metric;
    }
    for (auto &r : runs) {
        r.ttfr_ms = 246.0;
    }
    bool ttfr_failed = false;
    for (const auto &e : evaluate_slos("Baseline", runs, {}, 200)) {
        if (e.metric == "ttfr_ms") {
            ttfr_failed = e.status == report::Status::Fail;
        }
    }
    EXPECT_TRUE(ttfr_failed);
}
