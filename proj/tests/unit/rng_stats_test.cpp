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

#include <maestrocut/rng.hpp>
#include <maestrocut/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace maestrocut;

// Published SplitMix64 outputs for seed 0.
TEST(Rng, MatchesSplitMix64Reference) {
    Rng rng(0);
    EXPECT_EQ(rng(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng(), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(rng(), 0x06c45d188009454fULL);
}

TEST(Rng, ChildrenAreIndependentOfParentPosition) {
    Rng a(42);
    const Rng b(42);
    (void)a();
    (void)a();
    EXPECT_EQ(a.child("x")(), b.child("x")());
    EXPECT_NE(b.child("x")(), b.child("y")());
    EXPECT_NE(b.child(0)(), b.child(1)());
}

TEST(Rng, MomentsOfDistributions) {
    Rng rng(7);
    const int n = 200000;
    std::vector<double> u, z, e, l;
    for (int i = 0; i < n; ++i) {
        u.push_back(rng.uniform());
        z.push_back(rng.normal());
        e.push_back(rng.exponential(2.0));
        l.push_back(rng.lognormal_mean_cv(3.0, 0.5));
    }
    EXPECT_NEAR(stats::mean(u), 0.5, 0.005);
    EXPECT_NEAR(stats::sample_variance(u), 1.0 / 12.0, 0.002);
    EXPECT_NEAR(stats::mean(z), 0.0, 0.01);
    EXPECT_NEAR(stats::sample_variance(z), 1.0, 0.01);
    EXPECT_NEAR(stats::mean(e), 0.5, 0.005);
    EXPECT_NEAR(stats::mean(l), 3.0, 0.02);
    EXPECT_NEAR(std::sqrt(stats::sample_variance(l)) / 3.0, 0.5, 0.01);
}

TEST(Rng, UniformIntCoversRange) {
    Rng rng(9);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto k = rng.uniform_int(7);
        ASSERT_LT(k, 7U);
        ++counts[k];
    }
    for (const int c : counts) {
        EXPECT_NEAR(c, 10000, 400);
    }
}

TEST(Stats, QuantileType7) {
    const std::vector<double> xs = {4.0, 1.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(stats::quantile(xs, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(stats::quantile(xs, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(stats::median(xs), 2.5);
    // h = (n - 1) q = 2.85, between 3 and 4.
    EXPECT_DOUBLE_EQ(stats::quantile(xs, 0.95), 3.85);
    EXPECT_DOUBLE_EQ(stats::sample_variance(xs), 5.0 / 3.0);
    const std::vector<double> one = {2.0};
    EXPECT_DOUBLE_EQ(stats::sample_variance(one), 0.0);
}
