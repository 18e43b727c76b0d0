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

#include <maestrocut/circuit_io.hpp>
#include <maestrocut/cutgraph.hpp>
#include <maestrocut/errors.hpp>
#include <maestrocut/rng.hpp>

#include <maestrocut_tools/oracles.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace maestrocut;
using namespace maestrocut::cutgraph;

namespace {

Hypergraph path4() {
    std::vector<Gate> gates = {{"a", {0}, 0}, {"b", {1}, 0}, {"c", {2}, 0}, {"d", {3}, 0}};
    std::vector<Hyperedge> edges = {{{0, 1}}, {{1, 2}}, {{2, 3}}};
    return {gates, edges};
}

ObjectiveSpec spec_with(PolicyWeights w) {
    ObjectiveSpec s;
    s.weights = w;
    return s;
}

// Independent recomputation of J from the definitions.
double brute_j(const Hypergraph &hg, const Partition &p, const ObjectiveSpec &spec) {
    std::size_t cuts = 0;
    double eb = 0.0;
    for (const auto &e : hg.edges()) {
        std::set<BlockId> blocks;
        for (const auto v : e.pins) {
            blocks.insert(p.assignment[v]);
        }
        if (blocks.size() > 1) {
            ++cuts;
            eb += e.ebit_cost;
        }
    }
    std::vector<std::size_t> sizes(p.num_blocks(), 0);
    for (const auto b : p.assignment) {
        ++sizes[b];
    }
    double q = 0.0;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        if (sizes[b] == 0) {
            continue;
        }
        const double base = b < spec.queue.base_ms.size() ? spec.queue.base_ms[b] : 0.0;
        const double per = b < spec.queue.per_gate_ms.size() ? spec.queue.per_gate_ms[b] : 0.0;
        q = std::max(q, base + per * static_cast<double>(sizes[b]));
    }
    const auto &w = spec.weights;
    return w.alpha * static_cast<double>(cuts) / static_cast<double>(p.cut_budget) +
           w.beta * eb / spec.refs.e_ref + w.gamma * q / spec.refs.q_ref;
}

Partition random_partition(std::size_t v, std::size_t k, Rng &rng) {
    Partition p{std::vector<BlockId>(v), uniform_caps(k, 100, 100), 100};
    for (auto &b : p.assignment) {
        b = static_cast<BlockId>(rng.uniform_int(k));
    }
    return p;
}

} // namespace

TEST(CutSet, SingleBlockIsEmpty) {
    const auto hg = path4();
    const Partition p{{0, 0, 0, 0}, uniform_caps(1, 10, 10), 5};
    EXPECT_TRUE(cut_set(hg, p).empty());
}

TEST(CutSet, SpanningEdge) {
    const Hypergraph hg({{"a", {0}, 0}, {"b", {1}, 0}}, {{{0, 1}}});
    const Partition p{{0, 1}, uniform_caps(2, 10, 10), 5};
    EXPECT_EQ(cut_set(hg, p), std::vector<EdgeIndex>{0});
}

TEST(CutSet, MatchesEnumerationOnRandomInstances) {
    Rng rng = master_stream(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto hg = Hypergraph::from_circuit(oracle::random_circuit(
            4 + static_cast<int>(rng.uniform_int(9)), 5, rng));
        const auto p = random_partition(hg.num_vertices(), 2 + rng.uniform_int(2), rng);
        std::vector<EdgeIndex> want;
        for (EdgeIndex e = 0; e < hg.num_edges(); ++e) {
            std::set<BlockId> blocks;
            for (const auto v : hg.edge(e).pins) {
                blocks.insert(p.assignment[v]);
            }
            if (blocks.size() > 1) {
                want.push_back(e);
            }
        }
        EXPECT_EQ(cut_set(hg, p), want);
    }
}

TEST(CutSet, UnassignedVertexIsRejected) {
    const auto hg = path4();
    const Partition p{{0, 0, 7, 0}, uniform_caps(2, 10, 10), 5};
    EXPECT_THROW((void)cut_set(hg, p), AssignmentError);
}

TEST(Objective, SingleTermWeight) {
    // Three cut edges out of a budget of ten.
    const auto hg = path4();
    const Partition p{{0, 1, 0, 1}, uniform_caps(2, 10, 10), 10};
    EXPECT_NEAR(objective(hg, p, spec_with({1.0, 0.0, 0.0})).j, 0.3, 1e-12);
}

TEST(Objective, WeightedSumOfFields) {
    Rng rng = master_stream(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto hg = Hypergraph::from_circuit(oracle::random_circuit(10, 4, rng));
        auto p = random_partition(hg.num_vertices(), 3, rng);
        ObjectiveSpec s = spec_with({0.5, 0.3, 0.2});
        s.refs = {1.5, 2.0, 0};
        s.queue.base_ms = {1.0, 2.0, 3.0};
        s.queue.per_gate_ms = {0.5, 0.25, 1.0};
        const auto obj = objective(hg, p, s);
        EXPECT_NEAR(obj.j, 0.5 * obj.c_bar + 0.3 * obj.e_bar + 0.2 * obj.q_bar, 1e-12);
        EXPECT_NEAR(obj.j, brute_j(hg, p, s), 1e-12);
    }
}

TEST(Objective, ZeroBudgetIsAConfigurationError) {
    const auto hg = path4();
    const Partition p{{0, 0, 0, 0}, uniform_caps(1, 10, 10), 0};
    EXPECT_THROW((void)objective(hg, p, spec_with({1.0, 0.0, 0.0})), ConfigurationError);
}

TEST(PolicyWeights, MustSumToOne) {
    EXPECT_NO_THROW((PolicyWeights{0.4, 0.3, 0.3}.validate()));
    EXPECT_THROW((PolicyWeights{0.5, 0.5, 0.5}.validate()), ConfigurationError);
    EXPECT_THROW((PolicyWeights{1.2, -0.2, 0.0}.validate()), ConfigurationError);
}

TEST(MoveGain, InternalVertexCannotImprove) {
    const auto hg = path4();
    const Partition p{{0, 0, 0, 1}, uniform_caps(2, 10, 10), 10};
    EXPECT_LE(move_gain(hg, p, 0, 1, spec_with({1.0, 0.0, 0.0})), 0.0);
}

TEST(MoveGain, MatchesExhaustiveRecomputationOnPath) {
    const auto hg = path4();
    const auto s = spec_with({0.6, 0.4, 0.0});
    const Partition p{{0, 0, 1, 1}, uniform_caps(2, 10, 10), 3};
    for (VertexIndex v = 0; v < 4; ++v) {
        for (BlockId b = 0; b < 2; ++b) {
            auto moved = p;
            moved.assignment[v] = b;
            EXPECT_NEAR(move_gain(hg, p, v, b, s), brute_j(hg, p, s) - brute_j(hg, moved, s),
                        1e-12);
        }
    }
}

TEST(MoveGain, AntisymmetricAndExactOnRandomInstances) {
    Rng rng = master_stream(13);
    ObjectiveSpec s = spec_with({0.4, 0.3, 0.3});
    s.queue.per_gate_ms = {1.0, 2.0, 0.5};
    for (int trial = 0; trial < 100; ++trial) {
        const auto hg = Hypergraph::from_circuit(oracle::random_circuit(12, 5, rng));
        const auto p = random_partition(hg.num_vertices(), 3, rng);
        const auto v = static_cast<VertexIndex>(rng.uniform_int(hg.num_vertices()));
        const auto b = static_cast<BlockId>(rng.uniform_int(3));
        auto moved = p;
        moved.assignment[v] = b;
        const double g = move_gain(hg, p, v, b, s);
        EXPECT_NEAR(g, brute_j(hg, p, s) - brute_j(hg, moved, s), 1e-12);
        EXPECT_NEAR(g + move_gain(hg, moved, v, p.assignment[v], s), 0.0, 1e-12);
    }
}

TEST(MoveGain, InfeasibleMoveThrows) {
    const auto hg = path4();
    // Block 1 holds one qubit at most and already has one.
    const Partition p{{0, 0, 0, 1}, {{4, 4}, {1, 4}}, 10};
    EXPECT_THROW((void)move_gain(hg, p, 0, 1, spec_with({1.0, 0.0, 0.0})), FeasibilityError);
}

TEST(InitialPartition, SingleBlock) {
    Rng rng = master_stream(14);
    const auto hg = Hypergraph::from_circuit(oracle::random_circuit(10, 4, rng));
    const auto p = initial_partition(hg, uniform_caps(1, 4, 100), 10, spec_with({1, 0, 0}), 1);
    EXPECT_TRUE(cut_set(hg, p).empty());
}

TEST(InitialPartition, PigeonholeInfeasibility) {
    Rng rng = master_stream(15);
    const auto hg = Hypergraph::from_circuit(oracle::random_circuit(10, 6, rng));
    EXPECT_THROW((void)initial_partition(hg, uniform_caps(2, 2, 100), 10, spec_with({1, 0, 0}), 1),
                 InfeasibilityError);
}

TEST(InitialPartition, TwoClustersNearOptimum) {
    // Two five-gate chains on disjoint qubit pairs joined by one bridging gate.
    std::vector<Gate> gates;
    for (int i = 0; i < 5; ++i) {
        gates.push_back({"l" + std::to_string(i), {0, 1}, i});
    }
    for (int i = 0; i < 4; ++i) {
        gates.push_back({"r" + std::to_string(i), {2, 3}, i});
    }
    gates.push_back({"x", {1, 2}, 5});
    const auto hg = Hypergraph::from_circuit(gates);
    const auto caps = uniform_caps(2, 3, 10);
    const auto s = spec_with({1.0, 0.0, 0.0});
    const auto p = initial_partition(hg, caps, hg.num_edges(), s, 3);
    const auto best = oracle::exhaustive_partition_optimum(hg, caps, hg.num_edges(), s);
    ASSERT_TRUE(best.has_value());
    EXPECT_TRUE(is_feasible(hg, p));
    EXPECT_LE(objective(hg, p, s).j, *best * 1.05 + 1e-12);
}

TEST(FmRefine, NeverIncreasesJAndKeepsCaps) {
    Rng rng = master_stream(16);
    ObjectiveSpec s = spec_with({0.4, 0.3, 0.3});
    s.queue.per_gate_ms.assign(3, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto hg = Hypergraph::from_circuit(oracle::random_circuit(14, 6, rng));
        Partition p{std::vector<BlockId>(hg.num_vertices()), uniform_caps(3, 4, 20),
                    hg.num_edges()};
        for (auto &b : p.assignment) {
            b = static_cast<BlockId>(rng.uniform_int(3));
        }
        if (!is_feasible(hg, p)) {
            continue;
        }
        RefineStats stats;
        const auto out = fm_refine(hg, p, s, 8, &stats);
        EXPECT_TRUE(is_feasible(hg, out));
        EXPECT_LE(objective(hg, out, s).j, objective(hg, p, s).j + 1e-12);
        EXPECT_NEAR(stats.j_after, objective(hg, out, s).j, 1e-12);
    }
}

TEST(FmRefine, OptimumIsAFixedPoint) {
    Rng rng = master_stream(17);
    const auto s = spec_with({0.5, 0.5, 0.0});
    int checked = 0;
    for (int trial = 0; trial < 20 && checked < 5; ++trial) {
        const auto hg = Hypergraph::from_circuit(oracle::random_circuit(8, 4, rng));
        const auto caps = uniform_caps(2, 3, 20);
        // Find an optimal assignment directly.
        Partition best{std::vector<BlockId>(hg.num_vertices(), 0), caps, hg.num_edges()};
        double best_j = 1e300;
        Partition p = best;
        for (std::uint32_t mask = 0; mask < (1U << hg.num_vertices()); ++mask) {
            for (std::size_t v = 0; v < hg.num_vertices(); ++v) {
                p.assignment[v] = (mask >> v) & 1U;
            }
            if (is_feasible(hg, p) && objective(hg, p, s).j < best_j) {
                best_j = objective(hg, p, s).j;
                best = p;
            }
        }
        if (best_j == 1e300) {
            continue;
        }
        ++checked;
        EXPECT_EQ(fm_refine(hg, best, s, 4).assignment, best.assignment);
    }
    EXPECT_GT(checked, 0);
}

TEST(MovingReference, HalfLife) {
    MovingReference ref(8.0);
    ref.observe(4.0);
    EXPECT_DOUBLE_EQ(ref.value(), 4.0);
    for (int i = 0; i < 8; ++i) {
        ref.observe(0.0);
    }
    EXPECT_NEAR(ref.value(), 2.0, 1e-12);
}

TEST(CircuitIo, TextAndJsonAgree) {
    const auto a = parse_circuit_text("# demo\ngate g1 q=0,1 d=0\ngate g2 q=1,2 d=1 e=2.5\n\n"
                                      "gate g3 q=0 d=2\n");
    const auto b = parse_circuit_json(R"({"gates": [{"id": "g1", "q": [0, 1], "d": 0},
        {"id": "g2", "q": [1, 2], "d": 1, "e": 2.5}, {"id": "g3", "q": [0], "d": 2}]})");
    ASSERT_EQ(a.num_vertices(), 3U);
    ASSERT_EQ(a.num_edges(), b.num_edges());
    for (EdgeIndex e = 0; e < a.num_edges(); ++e) {
        EXPECT_EQ(a.edge(e).pins, b.edge(e).pins);
        EXPECT_EQ(a.edge(e).ebit_cost, b.edge(e).ebit_cost);
    }
    EXPECT_EQ(a.qubits(), (std::vector<int>{0, 1, 2}));
}

TEST(CircuitIo, MalformedLinesAreRejected) {
    EXPECT_THROW((void)parse_circuit_text("gate g1 q= d=0\n"), ParseError);
    EXPECT_THROW((void)parse_circuit_text("gate g1 q=0 d=0\ngate g1 q=1 d=0\n"), ParseError);
    EXPECT_THROW((void)parse_circuit_json("{\"gates\": 3}"), ParseError);
}
