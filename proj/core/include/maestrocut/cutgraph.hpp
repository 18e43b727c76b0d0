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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace maestrocut::cutgraph {

using VertexIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
/// Blocks are numbered 0..K-1.
using BlockId = std::uint32_t;

/// One gate instance of the cut circuit.
struct Gate {
    std::string id;
    std::vector<int> qubits; ///< logical qubits, kept sorted and unique
    int depth = 0;
};

struct Hyperedge {
    std::vector<VertexIndex> pins; ///< sorted, unique, at least two
    double weight = 1.0;           ///< coarsening affinity
    double ebit_cost = 1.0;        ///< e-bits charged when the edge is cut
};

/// Gate hypergraph. Immutable after construction.
class Hypergraph {
  public:
    Hypergraph() = default;

    /// Validates ids, pins and edge sizes; throws ParseError on violation.
    Hypergraph(std::vector<Gate> gates, std::vector<Hyperedge> edges);

    /**
     * Builds the hypergraph of a circuit: gates are ordered by (depth, input
     * order), and each gate g contributes the edge {g} plus the last earlier
     * gate on each of g's qubits. Edges with a single pin are dropped.
     * `edge_costs`, when non-empty, gives the e-bit cost of the edge created by
     * each input gate (same indexing as `gates`).
     */
    static Hypergraph from_circuit(std::vector<Gate> gates,
                                   std::span<const double> edge_costs = {});

    [[nodiscard]] std::size_t num_vertices() const noexcept { return gates_.size(); }
    [[nodiscard]] std::size_t num_edges() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<Gate> &gates() const noexcept { return gates_; }
    [[nodiscard]] const std::vector<Hyperedge> &edges() const noexcept { return edges_; }
    [[nodiscard]] const Gate &gate(VertexIndex v) const { return gates_.at(v); }
    [[nodiscard]] const Hyperedge &edge(EdgeIndex e) const { return edges_.at(e); }
    [[nodiscard]] std::span<const EdgeIndex> incident(VertexIndex v) const;

    /// Distinct logical qubits, ascending.
    [[nodiscard]] const std::vector<int> &qubits() const noexcept { return qubits_; }
    /// Distinct depth indices, ascending.
    [[nodiscard]] const std::vector<int> &depth_levels() const noexcept { return levels_; }
    /// Dense index of a qubit within qubits().
    [[nodiscard]] std::size_t qubit_slot(int qubit) const;
    [[nodiscard]] std::size_t level_slot(int depth) const;

  private:
    std::vector<Gate> gates_;
    std::vector<Hyperedge> edges_;
    std::vector<std::size_t> incidence_offsets_;
    std::vector<EdgeIndex> incidence_;
    std::vector<int> qubits_;
    std::vector<int> levels_;
};

/// Per-block limits. A block's depth is the number of distinct depth indices it holds.
struct BlockCaps {
    int max_qubits = 0;
    int max_depth = 0;
};

struct Partition {
    std::vector<BlockId> assignment; ///< block of every vertex
    std::vector<BlockCaps> caps;     ///< one entry per block; K = caps.size()
    std::size_t cut_budget = 0;      ///< C_max

    [[nodiscard]] std::size_t num_blocks() const noexcept { return caps.size(); }
    bool operator==(const Partition &) const = default;
};

[[nodiscard]] std::vector<BlockCaps> uniform_caps(std::size_t blocks, int max_qubits,
                                                  int max_depth);

struct PolicyWeights {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 0.0;

    /// Throws ConfigurationError unless all weights are >= 0 and sum to 1 within 1e-12.
    void validate() const;
};

struct NormalizationRefs {
    double e_ref = 1.0; ///< e-bits per cut
    double q_ref = 1.0; ///< ms
    int window = 0;     ///< samples folded into the moving averages

    void validate() const;
};

/// Exponential moving average with a half-life counted in observations.
/// The first observation initialises the average.
class MovingReference {
  public:
    explicit MovingReference(double half_life = 8.0);
    void observe(double x);
    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] int count() const noexcept { return count_; }

  private:
    double rate_;
    double value_ = 0.0;
    int count_ = 0;
};

/**
 * Expected queue delay of a partition: the slowest non-empty block, where block
 * b costs base_ms[b] + per_gate_ms[b] * |V_b|. Missing entries count as zero.
 */
struct QueueModel {
    std::vector<double> base_ms;
    std::vector<double> per_gate_ms;

    [[nodiscard]] double block_delay(BlockId block, std::size_t gates) const;
    [[nodiscard]] double expected_delay(std::span<const std::size_t> block_sizes) const;
};

/// Everything the normalised objective depends on besides the partition itself.
struct ObjectiveSpec {
    PolicyWeights weights;
    NormalizationRefs refs;
    QueueModel queue;
};

struct PartitionObjective {
    double c_bar = 0.0;
    double e_bar = 0.0;
    double q_bar = 0.0;
    double j = 0.0;
};

/// Throws AssignmentError unless every vertex has a block in range.
void validate_assignment(const Hypergraph &hg, const Partition &part);

/// Caps and cut budget both hold.
[[nodiscard]] bool is_feasible(const Hypergraph &hg, const Partition &part);

/// Hyperedges whose pins span at least two blocks, ascending.
[[nodiscard]] std::vector<EdgeIndex> cut_set(const Hypergraph &hg, const Partition &part);

/// Sum of e-bit costs over cut edges.
[[nodiscard]] double ebits(const Hypergraph &hg, const Partition &part);

[[nodiscard]] std::vector<std::size_t> block_sizes(const Hypergraph &hg, const Partition &part);

[[nodiscard]] PartitionObjective objective(const Hypergraph &hg, const Partition &part,
                                           const ObjectiveSpec &spec);

/// J(part) - J(part with `vertex` moved to `target`). Positive means the move helps.
/// Throws FeasibilityError when the moved partition violates caps or the cut budget.
[[nodiscard]] double move_gain(const Hypergraph &hg, const Partition &part, VertexIndex vertex,
                               BlockId target, const ObjectiveSpec &spec);

/**
 * Multilevel coarsen / seed / uncoarsen partitioner. K = caps.size().
 * Coarsening pairs clusters by heavy-edge rating (sum of w_e / (|e| - 1) over
 * shared edges), halving at most per level and stopping at 2K clusters or when
 * no feasible pair remains. The coarsest level is seeded greedily and each
 * level is refined with the FM pass before projecting down.
 * Throws InfeasibilityError when the caps cannot hold the circuit or the cut
 * budget cannot be met.
 */
[[nodiscard]] Partition initial_partition(const Hypergraph &hg, std::vector<BlockCaps> caps,
                                          std::size_t cut_budget, const ObjectiveSpec &spec,
                                          std::uint64_t seed);

struct RefineStats {
    int passes = 0;
    int moves = 0;
    double j_before = 0.0;
    double j_after = 0.0;
};

/**
 * Boundary FM refinement. Boundary vertices are popped from a max-heap keyed
 * by the number of incident cut edges (ties: lower vertex index first); each
 * is offered its single best feasible move into a neighbouring block and the
 * move is applied only if it strictly lowers J. Passes repeat until a pass
 * moves nothing or `max_passes` is reached.
 */
[[nodiscard]] Partition fm_refine(const Hypergraph &hg, const Partition &part,
                                  const ObjectiveSpec &spec, int max_passes,
                                  RefineStats *stats = nullptr);

} // namespace maestrocut::cutgraph
