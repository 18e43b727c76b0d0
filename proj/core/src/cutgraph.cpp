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

#include "maestrocut/cutgraph.hpp"

#include "maestrocut/errors.hpp"
#include "maestrocut/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace maestrocut::cutgraph {

// ---------------------------------------------------------------------------
// Hypergraph

Hypergraph::Hypergraph(std::vector<Gate> gates, std::vector<Hyperedge> edges)
    : gates_(std::move(gates)), edges_(std::move(edges)) {
    std::unordered_set<std::string> ids;
    for (auto &g : gates_) {
        if (!ids.insert(g.id).second) {
            throw ParseError("duplicate gate id '" + g.id + "'");
        }
        if (g.qubits.empty()) {
            throw ParseError("gate '" + g.id + "' acts on no qubits");
        }
        std::sort(g.qubits.begin(), g.qubits.end());
        g.qubits.erase(std::unique(g.qubits.begin(), g.qubits.end()), g.qubits.end());
    }
    const auto n = static_cast<VertexIndex>(gates_.size());
    for (auto &e : edges_) {
        std::sort(e.pins.begin(), e.pins.end());
        e.pins.erase(std::unique(e.pins.begin(), e.pins.end()), e.pins.end());
        if (e.pins.size() < 2) {
            throw ParseError("hyperedge with fewer than two distinct pins");
        }
        if (e.pins.back() >= n) {
            throw ParseError("hyperedge references a missing vertex");
        }
        if (!(e.weight >= 0.0) || !(e.ebit_cost >= 0.0)) {
            throw ParseError("hyperedge weight and e-bit cost must be nonnegative");
        }
    }

    std::vector<std::size_t> degree(gates_.size(), 0);
    for (const auto &e : edges_) {
        for (const auto v : e.pins) {
            ++degree[v];
        }
    }
    incidence_offsets_.assign(gates_.size() + 1, 0);
    for (std::size_t v = 0; v < gates_.size(); ++v) {
        incidence_offsets_[v + 1] = incidence_offsets_[v] + degree[v];
    }
    incidence_.resize(incidence_offsets_.back());
    std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
    for (EdgeIndex e = 0; e < edges_.size(); ++e) {
        for (const auto v : edges_[e].pins) {
            incidence_[fill[v]++] = e;
        }
    }

    for (const auto &g : gates_) {
        qubits_.insert(qubits_.end(), g.qubits.begin(), g.qubits.end());
        levels_.push_back(g.depth);
    }
    std::sort(qubits_.begin(), qubits_.end());
    qubits_.erase(std::unique(qubits_.begin(), qubits_.end()), qubits_.end());
    std::sort(levels_.begin(), levels_.end());
    levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
}

Hypergraph Hypergraph::from_circuit(std::vector<Gate> gates, std::span<const double> edge_costs) {
    if (!edge_costs.empty() && edge_costs.size() != gates.size()) {
        throw ParseError("edge cost list does not match gate count");
    }
    std::vector<VertexIndex> order(gates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](VertexIndex a, VertexIndex b) {
        return gates[a].depth < gates[b].depth;
    });

    std::unordered_map<int, VertexIndex> last_on_qubit;
    std::vector<Hyperedge> edges;
    for (const VertexIndex g : order) {
        Hyperedge edge;
        edge.pins.push_back(g);
        for (const int q : gates[g].qubits) {
            const auto it = last_on_qubit.find(q);
            if (it != last_on_qubit.end()) {
                edge.pins.push_back(it->second);
            }
            last_on_qubit[q] = g;
        }
        std::sort(edge.pins.begin(), edge.pins.end());
        edge.pins.erase(std::unique(edge.pins.begin(), edge.pins.end()), edge.pins.end());
        if (edge.pins.size() >= 2) {
            if (!edge_costs.empty()) {
                edge.ebit_cost = edge_costs[g];
            }
            edges.push_back(std::move(edge));
        }
    }
    return Hypergraph(std::move(gates), std::move(edges));
}

std::span<const EdgeIndex> Hypergraph::incident(VertexIndex v) const {
    const auto begin = incidence_offsets_.at(v);
    const auto end = incidence_offsets_.at(v + 1);
    return {incidence_.data() + begin, end - begin};
}

std::size_t Hypergraph::qubit_slot(int qubit) const {
    const auto it = std::lower_bound(qubits_.begin(), qubits_.end(), qubit);
    return static_cast<std::size_t>(it - qubits_.begin());
}

std::size_t Hypergraph::level_slot(int depth) const {
    const auto it = std::lower_bound(levels_.begin(), levels_.end(), depth);
    return static_cast<std::size_t>(it - levels_.begin());
}

// ---------------------------------------------------------------------------
// Parameters

std::vector<BlockCaps> uniform_caps(std::size_t blocks, int max_qubits, int max_depth) {
    return std::vector<BlockCaps>(blocks, BlockCaps{max_qubits, max_depth});
}

void PolicyWeights::validate() const {
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
        throw ConfigurationError("policy weights must be nonnegative");
    }
    if (std::abs(alpha + beta + gamma - 1.0) > 1e-12) {
        throw ConfigurationError("policy weights must sum to 1");
    }
}

void NormalizationRefs::validate() const {
    if (!(e_ref > 0.0) || !(q_ref > 0.0)) {
        throw ConfigurationError("normalisation references must be positive");
    }
}

MovingReference::MovingReference(double half_life)
    : rate_(1.0 - std::exp2(-1.0 / half_life)) {
    if (!(half_life > 0.0)) {
        throw ConfigurationError("half-life must be positive");
    }
}

void MovingReference::observe(double x) {
    value_ = count_ == 0 ? x : value_ + rate_ * (x - value_);
    ++count_;
}

double QueueModel::block_delay(BlockId block, std::size_t gates) const {
    const double base = block < base_ms.size() ? base_ms[block] : 0.0;
    const double per_gate = block < per_gate_ms.size() ? per_gate_ms[block] : 0.0;
    return base + per_gate * static_cast<double>(gates);
}

double QueueModel::expected_delay(std::span<const std::size_t> block_sizes) const {
    double worst = 0.0;
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
        if (block_sizes[b] > 0) {
            worst = std::max(worst, block_delay(static_cast<BlockId>(b), block_sizes[b]));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Incremental partition bookkeeping shared by the objective, gains and FM.

namespace {

class PartitionState {
  public:
    PartitionState(const Hypergraph &hg, const Partition &part, const ObjectiveSpec &spec)
        : hg_(hg), spec_(spec), k_(part.num_blocks()), assignment_(part.assignment),
          caps_(part.caps), budget_(part.cut_budget), nq_(hg.qubits().size()),
          nl_(hg.depth_levels().size()) {
        validate_assignment(hg, part);
        if (budget_ == 0) {
            throw ConfigurationError("cut budget C_max must be positive");
        }
        spec.weights.validate();
        spec.refs.validate();

        pin_count_.assign(hg.num_edges() * k_, 0);
        spanning_.assign(hg.num_edges(), 0);
        block_size_.assign(k_, 0);
        qubit_count_.assign(k_ * nq_, 0);
        block_qubits_.assign(k_, 0);
        level_count_.assign(k_ * nl_, 0);
        block_levels_.assign(k_, 0);

        vertex_qubit_slots_.resize(hg.num_vertices());
        vertex_level_slot_.resize(hg.num_vertices());
        for (VertexIndex v = 0; v < hg.num_vertices(); ++v) {
            for (const int q : hg.gate(v).qubits) {
                vertex_qubit_slots_[v].push_back(hg.qubit_slot(q));
            }
            vertex_level_slot_[v] = hg.level_slot(hg.gate(v).depth);
            add_vertex_to_block(v, assignment_[v]);
        }
        for (EdgeIndex e = 0; e < hg.num_edges(); ++e) {
            for (const auto v : hg.edge(e).pins) {
                if (pin_count_[e * k_ + assignment_[v]]++ == 0) {
                    ++spanning_[e];
                }
            }
            if (spanning_[e] >= 2) {
                ++cut_count_;
                ebits_ += hg.edge(e).ebit_cost;
            }
        }
    }

    [[nodiscard]] BlockId block_of(VertexIndex v) const { return assignment_[v]; }
    [[nodiscard]] std::size_t num_blocks() const { return k_; }
    [[nodiscard]] std::size_t cut_count() const { return cut_count_; }
    [[nodiscard]] std::size_t budget() const { return budget_; }
    [[nodiscard]] bool edge_cut(EdgeIndex e) const { return spanning_[e] >= 2; }
    [[nodiscard]] std::uint32_t pins_in(EdgeIndex e, BlockId b) const {
        return pin_count_[e * k_ + b];
    }

    [[nodiscard]] bool block_within_caps(BlockId b) const {
        return block_qubits_[b] <= caps_[b].max_qubits && block_levels_[b] <= caps_[b].max_depth;
    }
    [[nodiscard]] bool all_caps_ok() const {
        for (BlockId b = 0; b < k_; ++b) {
            if (!block_within_caps(b)) {
                return false;
            }
        }
        return true;
    }

    void move(VertexIndex v, BlockId to) {
        const BlockId from = assignment_[v];
        if (from == to) {
            return;
        }
        for (const auto e : hg_.incident(v)) {
            const bool was_cut = spanning_[e] >= 2;
            if (--pin_count_[e * k_ + from] == 0) {
                --spanning_[e];
            }
            if (pin_count_[e * k_ + to]++ == 0) {
                ++spanning_[e];
            }
            const bool is_cut = spanning_[e] >= 2;
            if (was_cut != is_cut) {
                if (is_cut) {
                    ++cut_count_;
                    ebits_ += hg_.edge(e).ebit_cost;
                } else {
                    --cut_count_;
                    ebits_ -= hg_.edge(e).ebit_cost;
                }
            }
        }
        remove_vertex_from_block(v, from);
        add_vertex_to_block(v, to);
        assignment_[v] = to;
    }

    [[nodiscard]] PartitionObjective objective() const {
        PartitionObjective obj;
        obj.c_bar = static_cast<double>(cut_count_) / static_cast<double>(budget_);
        obj.e_bar = ebits_ / spec_.refs.e_ref;
        obj.q_bar = spec_.queue.expected_delay(block_size_) / spec_.refs.q_ref;
        const auto &w = spec_.weights;
        obj.j = w.alpha * obj.c_bar + w.beta * obj.e_bar + w.gamma * obj.q_bar;
        return obj;
    }

    [[nodiscard]] double j() const { return objective().j; }

    [[nodiscard]] Partition to_partition() const {
        return Partition{assignment_, caps_, budget_};
    }

  private:
    void add_vertex_to_block(VertexIndex v, BlockId b) {
        ++block_size_[b];
        for (const auto slot : vertex_qubit_slots_[v]) {
            if (qubit_count_[b * nq_ + slot]++ == 0) {
                ++block_qubits_[b];
            }
        }
        if (level_count_[b * nl_ + vertex_level_slot_[v]]++ == 0) {
            ++block_levels_[b];
        }
    }

    void remove_vertex_from_block(VertexIndex v, BlockId b) {
        --block_size_[b];
        for (const auto slot : vertex_qubit_slots_[v]) {
            if (--qubit_count_[b * nq_ + slot] == 0) {
                --block_qubits_[b];
            }
        }
        if (--level_count_[b * nl_ + vertex_level_slot_[v]] == 0) {
            --block_levels_[b];
        }
    }

    const Hypergraph &hg_;
    const ObjectiveSpec &spec_;
    std::size_t k_;
    std::vector<BlockId> assignment_;
    std::vector<BlockCaps> caps_;
    std::size_t budget_;
    std::size_t nq_;
    std::size_t nl_;

    std::vector<std::uint32_t> pin_count_;
    std::vector<std::uint32_t> spanning_;
    std::size_t cut_count_ = 0;
    double ebits_ = 0.0;

    std::vector<std::size_t> block_size_;
    std::vector<std::uint32_t> qubit_count_;
    std::vector<int> block_qubits_;
    std::vector<std::uint32_t> level_count_;
    std::vector<int> block_levels_;

    std::vector<std::vector<std::size_t>> vertex_qubit_slots_;
    std::vector<std::size_t> vertex_level_slot_;
};

/// A grouping of vertices that move together; singletons at the finest level.
struct Level {
    std::vector<std::vector<VertexIndex>> clusters;
    std::vector<std::uint32_t> cluster_of;
};

Level singleton_level(std::size_t n) {
    Level level;
    level.clusters.resize(n);
    level.cluster_of.resize(n);
    for (VertexIndex v = 0; v < n; ++v) {
        level.clusters[v] = {v};
        level.cluster_of[v] = v;
    }
    return level;
}

constexpr double kStrictImprovement = 1e-12;

/// Number of distinct cut edges touching the cluster.
int cluster_pressure(const Hypergraph &hg, const PartitionState &state,
                     const std::vector<VertexIndex> &cluster, std::vector<std::uint32_t> &stamp,
                     std::uint32_t tag) {
    int pressure = 0;
    for (const auto v : cluster) {
        for (const auto e : hg.incident(v)) {
            if (stamp[e] != tag) {
                stamp[e] = tag;
                if (state.edge_cut(e)) {
                    ++pressure;
                }
            }
        }
    }
    return pressure;
}

void move_cluster(PartitionState &state, const std::vector<VertexIndex> &cluster, BlockId to) {
    for (const auto v : cluster) {
        state.move(v, to);
    }
}

/**
 * One FM refinement at a given clustering. A cluster is a boundary cluster
 * when one of its edges is cut; its candidate targets are the other blocks
 * that edge touches. Moves may not push the cut count above
 * max(C_max, current cut).
 */
RefineStats refine_level(const Hypergraph &hg, PartitionState &state, const Level &level,
                         int max_passes) {
    RefineStats stats;
    stats.j_before = state.j();
    const std::size_t nc = level.clusters.size();
    std::vector<std::uint32_t> stamp(hg.num_edges(), 0);
    std::uint32_t tag = 0;
    auto next_tag = [&] {
        if (++tag == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            tag = 1;
        }
        return tag;
    };

    using Entry = std::pair<int, std::int64_t>; // (pressure, -cluster)
    for (int pass = 0; pass < max_passes; ++pass) {
        ++stats.passes;
        bool moved = false;
        std::priority_queue<Entry> heap;
        std::vector<char> visited(nc, 0);
        for (std::uint32_t c = 0; c < nc; ++c) {
            const int p = cluster_pressure(hg, state, level.clusters[c], stamp, next_tag());
            if (p > 0) {
                heap.emplace(p, -static_cast<std::int64_t>(c));
            }
        }

        while (!heap.empty()) {
            const auto c = static_cast<std::uint32_t>(-heap.top().second);
            heap.pop();
            if (visited[c] != 0) {
                continue;
            }
            visited[c] = 1;
            const auto &cluster = level.clusters[c];
            const BlockId home = state.block_of(cluster.front());

            std::vector<BlockId> targets;
            const auto t = next_tag();
            for (const auto v : cluster) {
                for (const auto e : hg.incident(v)) {
                    if (stamp[e] == t || !state.edge_cut(e)) {
                        continue;
                    }
                    stamp[e] = t;
                    for (BlockId b = 0; b < state.num_blocks(); ++b) {
                        if (b != home && state.pins_in(e, b) > 0) {
                            targets.push_back(b);
                        }
                    }
                }
            }
            if (targets.empty()) {
                continue;
            }
            std::sort(targets.begin(), targets.end());
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

            const double j_now = state.j();
            const std::size_t cut_limit = std::max(state.budget(), state.cut_count());
            double best_j = std::numeric_limits<double>::infinity();
            BlockId best_block = home;
            for (const auto b : targets) {
                move_cluster(state, cluster, b);
                if (state.block_within_caps(b) && state.cut_count() <= cut_limit) {
                    const double j_new = state.j();
                    if (j_new < best_j) {
                        best_j = j_new;
                        best_block = b;
                    }
                }
                move_cluster(state, cluster, home);
            }
            if (best_block == home || !(best_j < j_now - kStrictImprovement)) {
                continue;
            }
            move_cluster(state, cluster, best_block);
            moved = true;
            ++stats.moves;

            for (const auto v : cluster) {
                for (const auto e : hg.incident(v)) {
                    for (const auto u : hg.edge(e).pins) {
                        const auto d = level.cluster_of[u];
                        if (visited[d] == 0 && d != c) {
                            const int p =
                                cluster_pressure(hg, state, level.clusters[d], stamp, next_tag());
                            if (p > 0) {
                                heap.emplace(p, -static_cast<std::int64_t>(d));
                            }
                        }
                    }
                }
            }
        }
        if (!moved) {
            break;
        }
    }
    stats.j_after = state.j();
    return stats;
}

struct ClusterShape {
    std::vector<int> qubits;
    std::vector<int> levels;
};

std::vector<int> sorted_union(const std::vector<int> &a, const std::vector<int> &b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

ClusterShape shape_of(const Hypergraph &hg, const std::vector<VertexIndex> &cluster) {
    ClusterShape s;
    for (const auto v : cluster) {
        s.qubits.insert(s.qubits.end(), hg.gate(v).qubits.begin(), hg.gate(v).qubits.end());
        s.levels.push_back(hg.gate(v).depth);
    }
    std::sort(s.qubits.begin(), s.qubits.end());
    s.qubits.erase(std::unique(s.qubits.begin(), s.qubits.end()), s.qubits.end());
    std::sort(s.levels.begin(), s.levels.end());
    s.levels.erase(std::unique(s.levels.begin(), s.levels.end()), s.levels.end());
    return s;
}

/// Heavy-edge matching of one level; returns the coarser level.
Level coarsen(const Hypergraph &hg, const Level &fine, const BlockCaps &largest, Rng &rng) {
    const std::size_t nc = fine.clusters.size();
    std::vector<ClusterShape> shapes(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        shapes[c] = shape_of(hg, fine.clusters[c]);
    }
    std::vector<std::uint32_t> order(nc);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::uint32_t>(order));

    constexpr auto kUnmatched = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> mate(nc, kUnmatched);
    std::vector<double> rating(nc, 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto c : order) {
        if (mate[c] != kUnmatched) {
            continue;
        }
        touched.clear();
        for (const auto v : fine.clusters[c]) {
            for (const auto e : hg.incident(v)) {
                const auto &edge = hg.edge(e);
                const double share = edge.weight / static_cast<double>(edge.pins.size() - 1);
                for (const auto u : edge.pins) {
                    const auto d = fine.cluster_of[u];
                    if (d == c || mate[d] != kUnmatched) {
                        continue;
                    }
                    if (rating[d] == 0.0) {
                        touched.push_back(d);
                    }
                    rating[d] += share;
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        std::uint32_t best = kUnmatched;
        double best_rating = 0.0;
        for (const auto d : touched) {
            const bool fits =
                static_cast<int>(sorted_union(shapes[c].qubits, shapes[d].qubits).size()) <=
                    largest.max_qubits &&
                static_cast<int>(sorted_union(shapes[c].levels, shapes[d].levels).size()) <=
                    largest.max_depth;
            if (fits && rating[d] > best_rating) {
                best_rating = rating[d];
                best = d;
            }
        }
        for (const auto d : touched) {
            rating[d] = 0.0;
        }
        if (best != kUnmatched) {
            mate[c] = best;
            mate[best] = c;
        }
    }

    Level coarse;
    coarse.cluster_of.assign(hg.num_vertices(), 0);
    std::vector<std::uint32_t> new_id(nc, kUnmatched);
    for (std::uint32_t c = 0; c < nc; ++c) {
        if (new_id[c] != kUnmatched) {
            continue;
        }
        const auto id = static_cast<std::uint32_t>(coarse.clusters.size());
        new_id[c] = id;
        std::vector<VertexIndex> members = fine.clusters[c];
        if (mate[c] != kUnmatched) {
            new_id[mate[c]] = id;
            const auto &other = fine.clusters[mate[c]];
            members.insert(members.end(), other.begin(), other.end());
        }
        std::sort(members.begin(), members.end());
        coarse.clusters.push_back(std::move(members));
    }
    for (std::size_t c = 0; c < coarse.clusters.size(); ++c) {
        for (const auto v : coarse.clusters[c]) {
            coarse.cluster_of[v] = static_cast<std::uint32_t>(c);
        }
    }
    return coarse;
}

/// Greedy placement of clusters into blocks: largest first, into the feasible
/// block with the strongest connectivity, then the lightest load.
/// Greedy packing of clusters into blocks. The first pass prefers the most
/// strongly linked block; the fallback sweeps clusters in qubit order and
/// prefers the block whose qubit set grows least.
bool seed_blocks(const Hypergraph &hg, const Level &level, const std::vector<BlockCaps> &caps,
                 std::vector<BlockId> &assignment, bool least_growth) {
    const std::size_t k = caps.size();
    const std::size_t nc = level.clusters.size();
    std::vector<ClusterShape> shapes(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        shapes[c] = shape_of(hg, level.clusters[c]);
    }
    std::vector<std::uint32_t> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (least_growth) {
            // Sweep along the qubit line so neighbouring wires end up together.
            return std::tie(shapes[a].qubits.front(), shapes[a].levels.front()) <
                   std::tie(shapes[b].qubits.front(), shapes[b].levels.front());
        }
        if (shapes[a].qubits.size() != shapes[b].qubits.size()) {
            return shapes[a].qubits.size() > shapes[b].qubits.size();
        }
        return level.clusters[a].size() > level.clusters[b].size();
    });

    std::vector<ClusterShape> blocks(k);
    std::vector<std::size_t> load(k, 0);
    constexpr auto kNone = std::numeric_limits<BlockId>::max();
    assignment.assign(hg.num_vertices(), kNone);

    for (const auto c : order) {
        std::vector<double> link(k, 0.0);
        for (const auto v : level.clusters[c]) {
            for (const auto e : hg.incident(v)) {
                for (const auto u : hg.edge(e).pins) {
                    if (assignment[u] != kNone) {
                        link[assignment[u]] += hg.edge(e).weight;
                    }
                }
            }
        }
        BlockId best = kNone;
        std::size_t best_growth = 0;
        for (BlockId b = 0; b < k; ++b) {
            const auto q = sorted_union(blocks[b].qubits, shapes[c].qubits);
            const auto l = sorted_union(blocks[b].levels, shapes[c].levels);
            if (static_cast<int>(q.size()) > caps[b].max_qubits ||
                static_cast<int>(l.size()) > caps[b].max_depth) {
                continue;
            }
            const std::size_t growth = q.size() - blocks[b].qubits.size();
            bool better = best == kNone;
            if (!better && least_growth && growth != best_growth) {
                better = growth < best_growth;
            } else if (!better) {
                better = link[b] > link[best] || (link[b] == link[best] && load[b] < load[best]);
            }
            if (better) {
                best = b;
                best_growth = growth;
            }
        }
        if (best == kNone) {
            return false;
        }
        blocks[best].qubits = sorted_union(blocks[best].qubits, shapes[c].qubits);
        blocks[best].levels = sorted_union(blocks[best].levels, shapes[c].levels);
        load[best] += level.clusters[c].size();
        for (const auto v : level.clusters[c]) {
            assignment[v] = best;
        }
    }
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Public operations

void validate_assignment(const Hypergraph &hg, const Partition &part) {
    if (part.assignment.size() != hg.num_vertices()) {
        throw AssignmentError("assignment covers " + std::to_string(part.assignment.size()) +
                              " of " + std::to_string(hg.num_vertices()) + " vertices");
    }
    if (part.caps.empty()) {
        throw AssignmentError("partition has no blocks");
    }
    for (std::size_t v = 0; v < part.assignment.size(); ++v) {
        if (part.assignment[v] >= part.num_blocks()) {
            throw AssignmentError("vertex " + std::to_string(v) + " assigned to block " +
                                  std::to_string(part.assignment[v]) + " of " +
                                  std::to_string(part.num_blocks()));
        }
    }
}

bool is_feasible(const Hypergraph &hg, const Partition &part) {
    const ObjectiveSpec neutral{};
    const PartitionState state(hg, part, neutral);
    return state.all_caps_ok() && state.cut_count() <= part.cut_budget;
}

std::vector<EdgeIndex> cut_set(const Hypergraph &hg, const Partition &part) {
    validate_assignment(hg, part);
    std::vector<EdgeIndex> cut;
    for (EdgeIndex e = 0; e < hg.num_edges(); ++e) {
        const auto &pins = hg.edge(e).pins;
        const BlockId first = part.assignment[pins.front()];
        const bool spans = std::any_of(pins.begin() + 1, pins.end(), [&](VertexIndex v) {
            return part.assignment[v] != first;
        });
        if (spans) {
            cut.push_back(e);
        }
    }
    return cut;
}

double ebits(const Hypergraph &hg, const Partition &part) {
    double total = 0.0;
    for (const auto e : cut_set(hg, part)) {
        total += hg.edge(e).ebit_cost;
    }
    return total;
}

std::vector<std::size_t> block_sizes(const Hypergraph &hg, const Partition &part) {
    validate_assignment(hg, part);
    std::vector<std::size_t> sizes(part.num_blocks(), 0);
    for (const auto b : part.assignment) {
        ++sizes[b];
    }
    return sizes;
}

PartitionObjective objective(const Hypergraph &hg, const Partition &part,
                             const ObjectiveSpec &spec) {
    return PartitionState(hg, part, spec).objective();
}

double move_gain(const Hypergraph &hg, const Partition &part, VertexIndex vertex, BlockId target,
                 const ObjectiveSpec &spec) {
    if (vertex >= hg.num_vertices()) {
        throw AssignmentError("vertex index out of range");
    }
    if (target >= part.num_blocks()) {
        throw FeasibilityError("target block out of range");
    }
    PartitionState state(hg, part, spec);
    const double before = state.j();
    state.move(vertex, target);
    if (!state.block_within_caps(target) || state.cut_count() > part.cut_budget) {
        throw FeasibilityError("moving vertex " + std::to_string(vertex) + " to block " +
                               std::to_string(target) + " violates caps or the cut budget");
    }
    return before - state.j();
}

Partition fm_refine(const Hypergraph &hg, const Partition &part, const ObjectiveSpec &spec,
                    int max_passes, RefineStats *stats) {
    PartitionState state(hg, part, spec);
    const auto result = refine_level(hg, state, singleton_level(hg.num_vertices()), max_passes);
    if (stats != nullptr) {
        *stats = result;
    }
    return state.to_partition();
}

Partition initial_partition(const Hypergraph &hg, std::vector<BlockCaps> caps,
                            std::size_t cut_budget, const ObjectiveSpec &spec,
                            std::uint64_t seed) {
    if (caps.empty()) {
        throw InfeasibilityError("at least one block is required");
    }
    if (cut_budget == 0) {
        throw ConfigurationError("cut budget C_max must be positive");
    }
    std::size_t qubit_capacity = 0;
    BlockCaps largest{0, 0};
    for (const auto &c : caps) {
        qubit_capacity += static_cast<std::size_t>(std::max(c.max_qubits, 0));
        largest.max_qubits = std::max(largest.max_qubits, c.max_qubits);
        largest.max_depth = std::max(largest.max_depth, c.max_depth);
    }
    if (qubit_capacity < hg.qubits().size()) {
        throw InfeasibilityError("block qubit caps sum to " + std::to_string(qubit_capacity) +
                                 " but the circuit uses " + std::to_string(hg.qubits().size()) +
                                 " qubits");
    }
    for (const auto &g : hg.gates()) {
        if (static_cast<int>(g.qubits.size()) > largest.max_qubits || largest.max_depth < 1) {
            throw InfeasibilityError("gate '" + g.id + "' does not fit in any block");
        }
    }

    Rng rng = master_stream(seed).child("initial_partition");
    std::vector<Level> levels{singleton_level(hg.num_vertices())};
    const std::size_t stop_at = 2 * caps.size();
    while (levels.back().clusters.size() > stop_at) {
        Level next = coarsen(hg, levels.back(), largest, rng);
        if (next.clusters.size() == levels.back().clusters.size()) {
            break;
        }
        levels.push_back(std::move(next));
    }

    std::vector<BlockId> assignment;
    auto seeded = static_cast<std::ptrdiff_t>(levels.size()) - 1;
    auto seed_level = [&](std::size_t l) {
        return seed_blocks(hg, levels[l], caps, assignment, false) ||
               seed_blocks(hg, levels[l], caps, assignment, true);
    };
    while (seeded >= 0 && !seed_level(static_cast<std::size_t>(seeded))) {
        --seeded;
    }
    if (seeded < 0) {
        throw InfeasibilityError("no assignment of gates to blocks satisfies the caps");
    }

    const Partition seeded_part{assignment, caps, cut_budget};
    PartitionState state(hg, seeded_part, spec);
    constexpr int kPassesPerLevel = 8;
    for (auto l = seeded; l >= 0; --l) {
        refine_level(hg, state, levels[static_cast<std::size_t>(l)], kPassesPerLevel);
    }
    if (state.cut_count() > cut_budget) {
        throw InfeasibilityError("initial partition cuts " + std::to_string(state.cut_count()) +
                                 " edges, above the budget of " + std::to_string(cut_budget));
    }
    return state.to_partition();
}

} // namespace maestrocut::cutgraph
