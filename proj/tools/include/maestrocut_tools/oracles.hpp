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

// Brute-force and independent reference solvers used by `selftest` and the
// test suites. They are deliberately simple and slow.

#include <maestrocut/allocator.hpp>
#include <maestrocut/cutgraph.hpp>
#include <maestrocut/rng.hpp>

#include <optional>
#include <span>
#include <vector>

namespace maestrocut::oracle {

/**
 * Minimises sum u_i^2 / s_i^2 subject to sum s_i = S, s_i >= s_min by
 * bisection on the Lagrange multiplier mu: each coordinate is
 * max(s_min, (2 u_i^2 / mu)^(1/3)).
 */
[[nodiscard]] std::vector<double> dual_bisection_allocation(std::span<const double> u,
                                                            double total, double s_min);

/// Every integer composition of `total` with parts >= s_min; returns the best objective.
[[nodiscard]] double exhaustive_integer_optimum(std::span<const double> u, alloc::Shots total,
                                                alloc::Shots s_min);

/// Random circuit of `gates` gates on `qubits` qubits, one or two qubits per gate.
[[nodiscard]] std::vector<cutgraph::Gate> random_circuit(int gates, int qubits, Rng &rng);

/// Lowest J over all feasible assignments; nullopt when nothing is feasible.
[[nodiscard]] std::optional<double> exhaustive_partition_optimum(
    const cutgraph::Hypergraph &hg, const std::vector<cutgraph::BlockCaps> &caps,
    std::size_t cut_budget, const cutgraph::ObjectiveSpec &spec);

/// Random symmetric positive semi-definite matrix (B B^T plus a random diagonal).
[[nodiscard]] Eigen::MatrixXd random_psd(int n, Rng &rng);

/// Fraction of trials in which at least one of k altered envelopes (chosen
/// uniformly among N) is one of h decoys placed uniformly among N.
[[nodiscard]] double simulate_detection(std::size_t n, std::size_t h, std::size_t k, int trials,
                                        Rng &rng);

/// Fraction of trials in which a batch whose decoys each pass with
/// probability 1 - 2 eps still reaches a pass rate >= 1 - eps.
[[nodiscard]] double simulate_accept_incorrect(std::size_t h, double eps, int trials, Rng &rng);

} // namespace maestrocut::oracle
