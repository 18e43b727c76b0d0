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

#include "maestrocut/cutgraph.hpp"
#include "maestrocut/topology.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maestrocut::tier1 {

/// Names of the five synthetic Tier-1 workloads, in report order.
[[nodiscard]] const std::vector<std::string> &workload_names();

/// Default fragment count for a workload name. Throws ConfigurationError for unknown names.
[[nodiscard]] std::size_t default_fragments(const std::string &name);

enum class VarianceProfile {
    Geometric, ///< sigma^2 spread geometrically between base and base * spread
    Hotspot,   ///< `hot` fragments at base * spread, the rest at base
};

[[nodiscard]] VarianceProfile parse_profile(const std::string &text);
[[nodiscard]] const char *to_string(VarianceProfile p) noexcept;

struct DriftEvent {
    int step = 0;
    std::size_t fragment = 0;
    double factor = 1.0; ///< multiplies the true variance at `step`
};

struct WorkloadParams {
    std::size_t fragments = 0;    ///< 0 selects the name's default
    VarianceProfile profile = VarianceProfile::Geometric;
    double spread = 4.0;          ///< max / min of the initial true variances
    std::size_t hot = 0;          ///< hotspot fragments; 0 selects n / 4
    double base_variance = 1.0;
    double process_noise = 1e-4;  ///< random-walk variance, relative to sigma^2(0)^2
    int steps = 100;              ///< episode horizon; the drift step lands at steps / 2
    double drift_factor = 3.0;    ///< +200%
    double drift_fraction = 0.25; ///< share of fragments hit by the drift step
    int layers = 6;
    int qubits_per_fragment = 3;
    int block_qubit_cap = 4;
};

struct WorkloadSpec {
    std::string name;
    std::size_t fragments = 0;
    std::vector<cutgraph::Gate> gates;
    int block_qubit_cap = 4;
    int block_depth_cap = 0;
    std::string topology; ///< "heavyhex:RxC"
    std::vector<NodeId> qubit_nodes; ///< logical qubit -> topology node
    std::vector<double> sigma2;        ///< initial true variances
    std::vector<double> process_noise; ///< per-fragment random-walk variance
    std::vector<DriftEvent> drift;     ///< sorted by step, then fragment
    std::vector<double> entropy_bits;  ///< true outcome entropy per fragment
};

/**
 * Deterministic synthetic workload. Circuits are built from groups of
 * `qubits_per_fragment` neighbouring qubits with a name-specific gate pattern
 * and sparse links between adjacent groups; qubits are laid out in snake order
 * on a heavy-hex lattice with three unit cells per row.
 */
[[nodiscard]] WorkloadSpec synth_workload(const std::string &name, std::uint64_t seed,
                                          const WorkloadParams &params = {});

/// Outcome distribution over 8 outcomes with the given entropy (one heavy outcome, the rest equal).
[[nodiscard]] std::vector<double> outcome_distribution(double entropy_bits);

} // namespace maestrocut::tier1
