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

#include <maestrocut/drifttrack.hpp>
#include <maestrocut/errors.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace maestrocut;
using namespace maestrocut::drift;

TEST(Cusum, FloorAtZero) {
    double s = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto step = cusum_update(s, 0.3, {0.5, 1.0});
        EXPECT_FALSE(step.triggered);
        s = step.s;
        EXPECT_EQ(s, 0.0);
    }
    const auto neg = cusum_update(0.4, -100.0, {0.5, 1.0});
    EXPECT_EQ(neg.s, 0.0);
    EXPECT_FALSE(neg.triggered);
}

TEST(Cusum, HandSteppedTrigger) {
    const CusumConfig cfg{0.5, 1.0};
    const auto a = cusum_update(0.0, 1.0, cfg);
    EXPECT_DOUBLE_EQ(a.s, 0.5);
    EXPECT_FALSE(a.triggered);
    const auto b = cusum_update(a.s, 1.0, cfg);
    EXPECT_TRUE(b.triggered);
    EXPECT_EQ(b.s, 0.0);
}

TEST(Cusum, ZeroThresholdFiresOnFirstExcess) {
    const CusumConfig cfg{0.5, 0.0};
    EXPECT_FALSE(cusum_update(0.0, 0.4, cfg).triggered);
    EXPECT_TRUE(cusum_update(0.0, 0.6, cfg).triggered);
}

TEST(CusumBank, FirstFiringDetectorStopsTheScan) {
    CusumBank bank({{0.0, 1.0}, {0.0, 1.0}});
    const std::vector<double> xs = {2.0, 2.0};
    EXPECT_EQ(bank.update(xs), 0);
    EXPECT_EQ(bank.accumulators()[0], 0.0);
    EXPECT_EQ(bank.accumulators()[1], 0.0);
    EXPECT_EQ(bank.update(xs), 0);
    const std::vector<double> wrong = {1.0};
    EXPECT_THROW((void)bank.update(wrong), DomainError);
}

TEST(Calibration, StandardNormalArl200) {
    const NullSampler normal = [](Rng &r) { return r.normal(); };
    const auto cal = calibrate_cusum_threshold(0.5, 200.0, normal, 5, 2000);
    const double arl = mean_run_length(0.5, cal.h, normal, 6, 2000, 20000);
    EXPECT_GE(arl, 160.0);
    EXPECT_LE(arl, 240.0);
}

TEST(Calibration, UnreachableTargets) {
    const NullSampler normal = [](Rng &r) { return r.normal(); };
    EXPECT_THROW((void)calibrate_cusum_threshold(0.5, 5.0, normal, 1, 200), DomainError);
    // With slack far above the spread of x nothing ever fires, so every run hits the cap.
    EXPECT_GE(mean_run_length(10.0, 1.0, normal, 1, 50, 1000), 1000.0);
}

TEST(Kalman, HandComputedStep) {
    const auto s = kalman_step({1.0, 0.05}, 1.5, {0.01, 0.04});
    EXPECT_NEAR(kalman_gain(0.05, {0.01, 0.04}), 0.6, 1e-12);
    EXPECT_NEAR(s.mean, 1.3, 1e-12);
    EXPECT_NEAR(s.p, 0.024, 1e-12);
}

TEST(Kalman, Limits) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto blind = kalman_step({2.0, 0.3}, 10.0, {0.1, inf});
    EXPECT_DOUBLE_EQ(blind.mean, 2.0);
    EXPECT_NEAR(blind.p, 0.4, 1e-15);
    const auto exact = kalman_step({2.0, 0.3}, 5.0, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(exact.mean, 5.0);
    EXPECT_DOUBLE_EQ(exact.p, 0.0);
    // p- = 0 with r = 0 is an intended perfect observation.
    const auto pinned = kalman_step({2.0, 0.0}, 5.0, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(pinned.mean, 5.0);
    EXPECT_DOUBLE_EQ(pinned.p, 0.0);
    EXPECT_THROW((void)kalman_gain(-0.5, {0.0, 0.5}), DegenerateGainError);
    EXPECT_EQ(kalman_step({0.1, 1.0}, -50.0, {0.0, 1.0}).mean, 0.0);
}

TEST(ProcessNoise, FirstDifferenceVariance) {
    // Differences 1, -1, 1, -1 have sample variance 4/3.
    const std::vector<double> w = {0.0, 1.0, 0.0, 1.0, 0.0};
    EXPECT_NEAR(calibrate_process_noise(w), 4.0 / 3.0, 1e-12);
    const std::vector<double> tiny = {1.0, 2.0};
    EXPECT_THROW((void)calibrate_process_noise(tiny), DomainError);
}
