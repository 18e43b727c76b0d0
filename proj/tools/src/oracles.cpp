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

#include "maestrocut_tools/oracles.hpp"

#include <maestrocut/errors.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace maestrocut::oracle {

std::vector<double> dual_bisection_allocation(std::span<const double> u, double total,
                                              double s_min) {
    const std::size_t n = u.size();
    auto shots_at = [&](double log_mu) {
        std::vector<double> s(n);
        const double mu = std::exp(log_mu);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::max(s_min, std::cbrt(2.0 * u[i] * u[i] / mu));
        }
        return s;
    };
    auto sum_at = [&](double log_mu) {
        const auto s = shots_at(log_mu);
        return std::accumulate(s.begin(), s.end(), 0.0);
    };
    // The sum decreases in mu.
    double lo = -800.0;
    double hi = 800.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sum_at(mid) > total) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return shots_at(0.5 * (lo + hi));
}

double exhaustive_integer_optimum(std::span<const double> u, alloc::Shots total,
                                  alloc::Shots s_min) {
    const std::size_t n = u.size();
    std::vector<alloc::Shots> s(n, s_min);
    double best = std::numeric_limits<double>::infinity();
    auto recurse = [&](auto &self, std::size_t i, alloc::Shots left) -> void {
        if (i + 1 == n) {
            if (left < s_min) {
                return;
            }
            s[i] = left;
            best = std::min(best, alloc::relaxed_objective(u, std::span<const alloc::Shots>(s)));
            return;
        }
        const auto rest = static_cast<alloc::Shots>(n - i - 1) * s_min;
        for (alloc::Shots v = s_min; v + rest <= left; ++v) {
            s[i] = v;
            self(self, i + 1, left - v);
        }
    };
    recurse(recurse, 0, total);
    return best;
}

std::vector<cutgraph::Gate> random_circuit(int gates, int qubits, Rng &rng) {
    std::vector<cutgraph::Gate> out;
    std::vector<int> depth(static_cast<std::size_t>(qubits), 0);
    for (int g = 0; g < gates; ++g) {
        const auto a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(qubits)));
        std::vector<int> q = {a};
        if (qubits > 1 && rng.bernoulli(0.7)) {
            auto b = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(qubits - 1)));
            q.push_back(b >= a ? b + 1 : b);
        }
        std::sort(q.begin(), q.end());
        int d = 0;
        for (const int x : q) {
            d = std::max(d, depth[static_cast<std::size_t>(x)]);
        }
        for (const int x : q) {
            depth[static_cast<std::size_t>(x)] = d + 1;
        }
        out.push_back({"g" + std::to_string(g), q, d});
    }
    return out;
}

namespace {

/// Every block sees the same value (missing entries count as zero).
bool uniform_per_block(const std::vector<double> &xs, std::size_t blocks) {
    if (xs.empty()) {
        return true;
    }
    return xs.size() >= blocks &&
           std::adjacent_find(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(blocks),
                              std::not_equal_to<>()) == xs.begin() + static_cast<std::ptrdiff_t>(blocks);
}

} // namespace

std::optional<double> exhaustive_partition_optimum(const cutgraph::Hypergraph &hg,
                                                   const std::vector<cutgraph::BlockCaps> &caps,
                                                   std::size_t cut_budget,
                                                   const cutgraph::ObjectiveSpec &spec) {
    const std::size_t v = hg.num_vertices();
    const std::size_t k = caps.size();
    // With identical blocks, relabelling blocks changes nothing, so only
    // canonical assignments (each new block is the lowest unused label) are visited.
    const bool interchangeable =
        std::all_of(caps.begin(), caps.end(),
                    [&](const cutgraph::BlockCaps &c) {
                        return c.max_qubits == caps[0].max_qubits &&
                               c.max_depth == caps[0].max_depth;
                    }) &&
        uniform_per_block(spec.queue.base_ms, k) && uniform_per_block(spec.queue.per_gate_ms, k);
    cutgraph::Partition part{std::vector<cutgraph::BlockId>(v, 0), caps, cut_budget};
    std::optional<double> best;
    auto visit = [&] {
        if (cutgraph::is_feasible(hg, part)) {
            const double j = cutgraph::objective(hg, part, spec).j;
            if (!best || j < *best) {
                best = j;
            }
        }
    };
    auto recurse = [&](auto &self, std::size_t i, std::size_t used) -> void {
        if (i == v) {
            visit();
            return;
        }
        const std::size_t limit = interchangeable ? std::min(k, used + 1) : k;
        for (std::size_t b = 0; b < limit; ++b) {
            part.assignment[i] = static_cast<cutgraph::BlockId>(b);
            self(self, i + 1, std::max(used, b + 1));
        }
    };
    if (v == 0) {
        visit();
    } else {
        recurse(recurse, 0, 0);
    }
    return best;
}

Eigen::MatrixXd random_psd(int n, Rng &rng) {
    const int rank = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    Eigen::MatrixXd b(n, rank);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < rank; ++j) {
            b(i, j) = rng.normal();
        }
    }
    Eigen::MatrixXd m = b * b.transpose();
    for (int i = 0; i < n; ++i) {
        m(i, i) += rng.uniform();
    }
    return m;
}

double simulate_detection(std::size_t n, std::size_t h, std::size_t k, int trials, Rng &rng) {
    std::vector<std::size_t> idx(n);
    int detected = 0;
    for (int t = 0; t < trials; ++t) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        rng.shuffle(std::span(idx));
        // Decoys are positions [0, h); the adversary alters the first k of a fresh permutation.
        std::vector<std::size_t> altered(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        if (std::any_of(altered.begin(), altered.end(), [&](std::size_t x) { return x < h; })) {
            ++detected;
        }
    }
    return static_cast<double>(detected) / static_cast<double>(trials);
}

double simulate_accept_incorrect(std::size_t h, double eps, int trials, Rng &rng) {
    if (h == 0) {
        return 1.0;
    }
    int accepted = 0;
    for (int t = 0; t < trials; ++t) {
        std::size_t passed = 0;
        for (std::size_t i = 0; i < h; ++i) {
            passed += rng.bernoulli(1.0 - 2.0 * eps) ? 1U : 0U;
        }
        if (static_cast<double>(passed) / static_cast<double>(h) >= 1.0 - eps) {
            ++accepted;
        }
    }
    return static_cast<double>(accepted) / static_cast<double>(trials);
}

} // namespace maestrocut::oracle
