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

#pragma once

#include "maestrocut/report.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace maestrocut::tier2 {

struct ScenarioConfig {
    std::string name = "Baseline";
    double arrival_rate = 20.0; ///< jobs per second
    bool bursty = false;        ///< two-state modulated Poisson arrivals
    double burst_multiplier = 2.0;
    double burst_on_s = 1.0;    ///< mean sojourn in the high-rate state
    double burst_off_s = 6.0;   ///< mean sojourn in the base-rate state
    int servers = 8;
    int fragments_per_job = 4;
    double service_mean_ms = 60.0;
    double service_cv = 0.5;
    double result_latency_ms = 130.0;
    double retry_probability = 0.0; ///< per fragment execution, up to 3 retries
    double error_rate = 0.005;      ///< per job
    double injection_rate = 0.0;    ///< oversized head-of-line jobs per second
    double injection_size = 10.0;   ///< service multiplier of injected work
    double timeout_ms = 2000.0;
    double duration_s = 60.0;

    /// Throws ConfigurationError on invalid values.
    void validate() const;
};

/// Default calibrations of the four named scenarios.
[[nodiscard]] std::vector<ScenarioConfig> default_scenarios();

struct RunMetrics {
    double jitter_ms = 0.0;
    double ttfr_ms = 0.0;
    double success_fraction = 0.0;
    double timeout_fraction = 0.0;
    double error_fraction = 0.0;
    double qps_raw = 0.0;
    double qps_success = 0.0;
    double phasepad_overhead = 0.0;
    std::size_t jobs = 0;
};

struct JobTrace {
    double admitted_ms = 0.0;
    double first_result_ms = 0.0;
    double completed_ms = 0.0;
    bool error = false;
};

/**
 * One episode of the FIFO multi-server queue. Jobs split into fragments that
 * queue individually; injected jobs enter at the head of the queue and are not
 * reported. Service times are lognormal, inflated by `overhead`. With
 * `backlog` set, every job is admitted at time 0 (the throughput probe).
 * Jobs are returned in admission order.
 */
[[nodiscard]] std::vector<JobTrace> simulate_trace(const ScenarioConfig &scenario,
                                                   double overhead, std::uint64_t seed,
                                                   std::uint64_t episode, bool backlog = false);

/**
 * Jitter: median |L_t - L_(t-1)| over job latencies in completion order.
 * TTFR: median of admission to first fragment result. Outcomes: timeout when
 * latency exceeds the timeout, else error when the job's error draw fired, else
 * success. Throughput is per second of makespan.
 */
[[nodiscard]] RunMetrics summarise(std::span<const JobTrace> jobs, const ScenarioConfig &scenario,
                                   double overhead);

[[nodiscard]] std::vector<RunMetrics> simulate_queue(const ScenarioConfig &scenario,
                                                     int episodes, std::uint64_t seed,
                                                     double overhead = 0.0);

/// Backlog throughput at each overhead level relative to level 0, over shared seeds.
[[nodiscard]] std::vector<double> overhead_sweep(const ScenarioConfig &scenario,
                                                 std::span<const double> levels,
                                                 std::uint64_t seed, int episodes = 10);

/// Median and bootstrap CI of every SLO metric; throws DomainError below 30 episodes.
[[nodiscard]] std::vector<report::DashboardEntry>
evaluate_slos(const std::string &scenario, std::span<const RunMetrics> metrics,
              const report::Targets &targets, int resamples = report::kDefaultResamples,
              std::uint64_t seed = 0);

inline constexpr int kMinEpisodes = 30;

} // namespace maestrocut::tier2
