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

#include "maestrocut/allocator.hpp"
#include "maestrocut/cascade.hpp"
#include "maestrocut/cutgraph.hpp"
#include "maestrocut/phasepad.hpp"
#include "maestrocut/rng.hpp"
#include "maestrocut/workload.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maestrocut::tier1 {

using alloc::Shots;

enum class Policy { Uniform, Proportional, TopoGP };

[[nodiscard]] Policy parse_policy(const std::string &text);
[[nodiscard]] const char *to_string(Policy p) noexcept;
[[nodiscard]] const std::vector<Policy> &all_policies();

struct EpisodeConfig {
    int steps = 100;
    Shots shots_per_step = 8000;
    Shots cadence = 500;
    Shots s_min = 32;
    std::uint64_t seed = 0;
    Policy policy = Policy::TopoGP;
    alloc::KernelParams kernel{1.0, 1.0};
    double rho = 0.05;
    double cusum_kappa = 1.0;
    double arl_per_fragment = 200.0; ///< per-detector ARL0 target is this times n
    double cusum_h = 0.0;            ///< 0 calibrates the threshold
    int warmup = 10;                 ///< steps before q is frozen and detectors arm
    cascade::CascadeFit fit{1.0, 100.0, {0.05, 1.0}};
    bool cascade_enabled = true;
    double pilot_fraction = 0.01;
    int refine_passes = 4;
    cutgraph::PolicyWeights weights{0.4, 0.3, 0.3};
    phasepad::SecurityParams security;
    bool phasepad_enabled = true;

    /// Throws ConfigurationError on invalid values.
    void validate(std::size_t fragments) const;
};

struct StepRecord {
    int step = 0;
    std::vector<Shots> plan;
    std::vector<double> truth;
    std::vector<double> observation;
    std::vector<double> kalman_mean;
    std::vector<double> innovation; ///< normalised |z - m^-| / sqrt(p^- + r)
    int trigger = -1;               ///< fragment whose detector fired, or -1
    bool repartitioned = false;
    std::vector<cascade::Estimator> choices;
    double stitched_variance = 0.0;
    double squared_error = 0.0;
};

struct EpisodeResult {
    std::string workload;
    Policy policy = Policy::TopoGP;
    std::uint64_t seed = 0;
    double cusum_h = 0.0;
    std::vector<StepRecord> steps;
    int dispatches = 0;
    int aborts = 0;
    int reallocations = 0;
    double phasepad_seconds = 0.0;  ///< whole dispatch round trip, verification included
    double mask_seal_seconds = 0.0; ///< masking and sealing only
    double total_seconds = 0.0;
};

/// sigma^2 <- max(0, sigma^2 + w), w ~ N(0, q_i), then any drift scheduled at step t.
[[nodiscard]] std::vector<double> evolve_truth(const std::vector<double> &truth, int t,
                                               const WorkloadSpec &spec, Rng &rng);

/**
 * Sample variance of s_i draws from N(0, sigma_i^2); fragment i draws from
 * rng.child(i), so arms with different plans share a common prefix of draws.
 * A single draw falls back to its square.
 */
[[nodiscard]] std::vector<double> observe(const std::vector<double> &truth,
                                          std::span<const Shots> plan, const Rng &rng);

/// Medoid topology node of the qubits each block touches (ties: lowest node id).
[[nodiscard]] std::vector<NodeId> block_anchors(const cutgraph::Hypergraph &hg,
                                                const cutgraph::Partition &part,
                                                const WorkloadSpec &spec, const Topology &topo);

/// y^T Sigma y with y_i = u_i / s_i from the true variances; Sigma from the kernel on anchors.
[[nodiscard]] double stitched_variance(std::span<const double> truth, std::span<const Shots> plan,
                                       const Topology &topo, std::span<const NodeId> anchors,
                                       const alloc::KernelParams &kernel, double rho);

/// Threshold for a half-normal null at the given per-detector ARL0, cached per (kappa, target).
[[nodiscard]] double trigger_threshold(double kappa, double target_arl0);

[[nodiscard]] EpisodeResult run_episode(const WorkloadSpec &spec, const EpisodeConfig &cfg);

struct EpisodeMetrics {
    double contraction = 1.0; ///< mean stitched variance, policy / uniform
    double p95_tail = 0.0;    ///< 95th percentile of final-step shots
    double final_mse = 0.0;   ///< mean squared error at the final step
};

/// Throws PairingError unless both results share workload, seed and horizon.
[[nodiscard]] EpisodeMetrics episode_metrics(const EpisodeResult &policy,
                                             const EpisodeResult &uniform);

} // namespace maestrocut::tier1
