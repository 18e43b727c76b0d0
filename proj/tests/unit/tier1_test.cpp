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
#include <maestrocut/stats.hpp>
#include <maestrocut/tier1.hpp>
#include <maestrocut/topology.hpp>
#include <maestrocut/workload.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace maestrocut;
using namespace maestrocut::tier1;

namespace {

EpisodeConfig quick_config(std::uint64_t seed, Policy policy) {
    EpisodeConfig cfg;
    cfg.seed = seed;
    cfg.policy = policy;
    cfg.steps = 40;
    cfg.cusum_h = 8.0;
    return cfg;
}

} // namespace

TEST(Workload, DeterministicAndSized) {
    for (const auto &name : workload_names()) {
        const auto a = synth_workload(name, 5);
        const auto b = synth_workload(name, 5);
        EXPECT_EQ(a.sigma2, b.sigma2);
        EXPECT_EQ(a.gates.size(), b.gates.size());
        EXPECT_EQ(a.fragments, default_fragments(name));
        EXPECT_EQ(a.sigma2.size(), a.fragments);
    }
    EXPECT_THROW((void)synth_workload("Nope", 1), ConfigurationError);
}

TEST(Workload, SpreadOneIsHomogeneous) {
    WorkloadParams p;
    p.spread = 1.0;
    const auto spec = synth_workload("TFIM", 3, p);
    for (const double s : spec.sigma2) {
        EXPECT_DOUBLE_EQ(s, spec.sigma2.front());
    }
}

TEST(Workload, OutcomeDistributionHasRequestedEntropy) {
    for (const double h : {0.0, 0.5, 1.7, 2.9}) {
        const auto p = outcome_distribution(h);
        double got = 0.0;
        for (const double x : p) {
            got -= x > 0.0 ? x * std::log2(x) : 0.0;
        }
        EXPECT_NEAR(got, h, 1e-9);
    }
}

TEST(Truth, FrozenWithoutNoiseAndJumpsOnSchedule) {
    WorkloadParams p;
    p.process_noise = 0.0;
    p.steps = 20;
    auto spec = synth_workload("PhaseEstimation", 2, p);
    Rng rng = master_stream(1);
    std::vector<double> truth = spec.sigma2;
    const int t_star = spec.drift.front().step;
    for (int t = 1; t < 20; ++t) {
        const auto next = evolve_truth(truth, t, spec, rng);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool hit = std::any_of(spec.drift.begin(), spec.drift.end(), [&](const auto &d) {
                return d.step == t && d.fragment == i;
            });
            EXPECT_DOUBLE_EQ(next[i], hit ? truth[i] * 3.0 : truth[i]);
        }
        EXPECT_EQ(t == t_star, next != truth);
        truth = next;
    }
}

TEST(Truth, IncrementVarianceMatchesProcessNoise) {
    WorkloadParams p;
    p.base_variance = 100.0;
    p.spread = 1.0;
    p.process_noise = 1e-4;
    p.drift_fraction = 0.0;
    auto spec = synth_workload("PhaseEstimation", 4, p);
    Rng rng = master_stream(2);
    std::vector<double> truth = spec.sigma2;
    std::vector<double> inc;
    for (int t = 1; t <= 1000; ++t) {
        const auto next = evolve_truth(truth, t, spec, rng);
        inc.push_back(next[0] - truth[0]);
        truth = next;
    }
    EXPECT_NEAR(stats::sample_variance(inc), spec.process_noise[0],
                0.15 * spec.process_noise[0]);
}

TEST(Observe, DegenerateAndConcentrated) {
    const Rng rng = master_stream(3);
    const std::vector<double> zero = {0.0};
    const std::vector<Shots> s1 = {100};
    EXPECT_EQ(observe(zero, s1, rng)[0], 0.0);
    const std::vector<double> one = {1.0};
    const std::vector<Shots> big = {1000000};
    EXPECT_NEAR(observe(one, big, rng)[0], 1.0, 0.01);
}

TEST(Metrics, SelfRatioAndUniformTail) {
    const auto spec = synth_workload("TFIM", 6);
    const auto uniform = run_episode(spec, quick_config(6, Policy::Uniform));
    const auto m = episode_metrics(uniform, uniform);
    EXPECT_DOUBLE_EQ(m.contraction, 1.0);
    const auto plan = alloc::uniform_plan(spec.fragments, 8000, 32);
    std::vector<double> shots(plan.shots.begin(), plan.shots.end());
    EXPECT_DOUBLE_EQ(m.p95_tail, stats::quantile(shots, 0.95));
    const auto other = run_episode(spec, quick_config(7, Policy::Uniform));
    EXPECT_THROW((void)episode_metrics(other, uniform), PairingError);
}

TEST(Episode, HomogeneousWorkloadGivesNoContraction) {
    WorkloadParams p;
    p.spread = 1.0;
    p.drift_fraction = 0.0;
    double sum = 0.0;
    double prop = 0.0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        const auto spec = synth_workload("PhaseEstimation", static_cast<std::uint64_t>(s), p);
        const auto u = run_episode(spec, quick_config(static_cast<std::uint64_t>(s), Policy::Uniform));
        const auto t = run_episode(spec, quick_config(static_cast<std::uint64_t>(s), Policy::TopoGP));
        sum += episode_metrics(t, u).contraction;
        const auto pr =
            run_episode(spec, quick_config(static_cast<std::uint64_t>(s), Policy::Proportional));
        prop += episode_metrics(pr, u).contraction;
    }
    for (const double mean : {sum / seeds, prop / seeds}) {
        EXPECT_GE(mean, 0.9);
        EXPECT_LE(mean, 1.1);
    }
}

TEST(Episode, FourfoldHeterogeneityContracts) {
    WorkloadParams p;
    p.spread = 4.0;
    std::vector<double> ratios;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto spec = synth_workload("UCCSD-LiH", s, p);
        const auto u = run_episode(spec, quick_config(s, Policy::Uniform));
        const auto t = run_episode(spec, quick_config(s, Policy::TopoGP));
        ratios.push_back(episode_metrics(t, u).contraction);
    }
    const auto ci = report::bootstrap_ci(ratios, report::Statistic::Mean, 2000);
    EXPECT_LT(ci.value, 1.0);
    EXPECT_LT(ci.upper, 1.0);
}

TEST(Episode, PlansRespectBudgetAndFloor) {
    const auto spec = synth_workload("UCCSD-LiH", 8);
    for (const auto policy : all_policies()) {
        const auto res = run_episode(spec, quick_config(8, policy));
        ASSERT_EQ(res.steps.size(), 40U);
        for (const auto &step : res.steps) {
            Shots sum = 0;
            for (const auto s : step.plan) {
                EXPECT_GE(s, 32);
                sum += s;
            }
            EXPECT_EQ(sum, 8000);
            EXPECT_EQ(step.choices.size(), spec.fragments);
        }
        EXPECT_GE(res.dispatches, 1);
        EXPECT_EQ(res.aborts, 0);
    }
}

TEST(Episode, SameSeedSameResult) {
    const auto spec = synth_workload("QAOA-MaxCut", 9);
    const auto a = run_episode(spec, quick_config(9, Policy::TopoGP));
    const auto b = run_episode(spec, quick_config(9, Policy::TopoGP));
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        EXPECT_EQ(a.steps[i].plan, b.steps[i].plan);
        EXPECT_EQ(a.steps[i].stitched_variance, b.steps[i].stitched_variance);
    }
}

TEST(Policy, ParseRoundTrip) {
    for (const auto p : all_policies()) {
        EXPECT_EQ(parse_policy(to_string(p)), p);
    }
    EXPECT_THROW((void)parse_policy("Greedy"), ConfigurationError);
}
