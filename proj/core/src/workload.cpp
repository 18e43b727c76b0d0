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

#include "maestrocut/workload.hpp"

#include "maestrocut/errors.hpp"
#include "maestrocut/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maestrocut::tier1 {

namespace {

struct Pattern {
    std::size_t fragments;
    double entropy_lo;
    double entropy_hi;
    int link_every; ///< layers between inter-group links
    bool random_pairs;
};

Pattern pattern(const std::string &name) {
    if (name == "QAOA-MaxCut") {
        return {16, 0.5, 2.0, 2, false};
    }
    if (name == "UCCSD-LiH") {
        return {12, 0.5, 1.5, 3, false};
    }
    if (name == "TFIM") {
        return {10, 1.0, 2.5, 2, false};
    }
    if (name == "RandomCliffordT") {
        return {12, 2.5, 3.0, 2, true};
    }
    if (name == "PhaseEstimation") {
        return {8, 0.2, 1.0, 3, false};
    }
    throw ConfigurationError("unknown workload '" + name + "'");
}

double entropy_bits(const std::vector<double> &p) {
    double h = 0.0;
    for (const double x : p) {
        if (x > 0.0) {
            h -= x * std::log2(x);
        }
    }
    return h;
}

} // namespace

const std::vector<std::string> &workload_names() {
    static const std::vector<std::string> names = {"QAOA-MaxCut", "UCCSD-LiH", "TFIM",
                                                   "RandomCliffordT", "PhaseEstimation"};
    return names;
}

std::size_t default_fragments(const std::string &name) { return pattern(name).fragments; }

VarianceProfile parse_profile(const std::string &text) {
    if (text == "geometric") {
        return VarianceProfile::Geometric;
    }
    if (text == "hotspot") {
        return VarianceProfile::Hotspot;
    }
    throw ConfigurationError("unknown variance profile '" + text + "'");
}

const char *to_string(VarianceProfile p) noexcept {
    return p == VarianceProfile::Hotspot ? "hotspot" : "geometric";
}

std::vector<double> outcome_distribution(double entropy) {
    constexpr int kOutcomes = 8;
    const double h_max = std::log2(static_cast<double>(kOutcomes));
    if (!(entropy >= 0.0) || entropy > h_max + 1e-12) {
        throw DomainError("entropy must lie in [0, 3] bits");
    }
    auto dist = [](double heavy) {
        std::vector<double> p(kOutcomes, (1.0 - heavy) / (kOutcomes - 1));
        p[0] = heavy;
        return p;
    };
    // Entropy decreases as the heavy outcome grows from 1/8 to 1.
    double lo = 1.0 / kOutcomes;
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (entropy_bits(dist(mid)) > entropy) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return dist(0.5 * (lo + hi));
}

WorkloadSpec synth_workload(const std::string &name, std::uint64_t seed,
                            const WorkloadParams &params) {
    const Pattern pat = pattern(name);
    WorkloadSpec spec;
    spec.name = name;
    spec.fragments = params.fragments == 0 ? pat.fragments : params.fragments;
    const std::size_t n = spec.fragments;
    if (n == 0 || params.qubits_per_fragment < 1 || params.layers < 1 ||
        params.block_qubit_cap < params.qubits_per_fragment) {
        throw ConfigurationError("workload needs fragments >= 1, layers >= 1 and a block "
                                 "qubit cap of at least qubits_per_fragment");
    }
    if (!(params.spread >= 1.0) || !(params.base_variance > 0.0) ||
        !(params.process_noise >= 0.0) || params.steps < 1 || !(params.drift_factor >= 0.0) ||
        !(params.drift_fraction >= 0.0 && params.drift_fraction <= 1.0)) {
        throw ConfigurationError("workload variance parameters out of range");
    }
    const Rng root = master_stream(seed).child("workload").child(name);

    // Circuit.
    const int g = params.qubits_per_fragment;
    const int qubits = static_cast<int>(n) * g;
    Rng circ = root.child("circuit");
    int next_id = 0;
    auto add = [&](std::vector<int> q, int depth) {
        std::sort(q.begin(), q.end());
        q.erase(std::unique(q.begin(), q.end()), q.end());
        spec.gates.push_back({"g" + std::to_string(next_id++), std::move(q), depth});
    };
    for (int layer = 0; layer < params.layers; ++layer) {
        for (int grp = 0; grp < static_cast<int>(n); ++grp) {
            const int first = grp * g;
            if (g == 1) {
                add({first}, 2 * layer);
                continue;
            }
            int a = 0;
            int b = 0;
            if (pat.random_pairs) {
                a = static_cast<int>(circ.uniform_int(static_cast<std::uint64_t>(g)));
                b = static_cast<int>(circ.uniform_int(static_cast<std::uint64_t>(g - 1)));
                b = b >= a ? b + 1 : b;
            } else {
                a = layer % g;
                b = (layer + 1) % g;
            }
            add({first + a, first + b}, 2 * layer);
        }
        if (layer % pat.link_every == pat.link_every - 1) {
            const int parity = (layer / pat.link_every) % 2;
            for (int grp = parity; grp + 1 < static_cast<int>(n); grp += 2) {
                add({grp * g + g - 1, (grp + 1) * g}, 2 * layer + 1);
            }
        }
    }
    spec.block_qubit_cap = params.block_qubit_cap;
    spec.block_depth_cap = 2 * params.layers;

    // Layout: snake order over rows of a heavy-hex lattice, three cells wide.
    constexpr int kCols = 3;
    constexpr int kWidth = 4 * kCols + 1;
    const int rows = std::max(1, (qubits + kWidth - 1) / kWidth);
    spec.topology = "heavyhex:" + std::to_string(rows) + "x" + std::to_string(kCols);
    for (int q = 0; q < qubits; ++q) {
        const int r = q / kWidth;
        const int c = r % 2 == 0 ? q % kWidth : kWidth - 1 - q % kWidth;
        spec.qubit_nodes.push_back(static_cast<NodeId>(r * kWidth + c));
    }

    // True variances.
    Rng var = root.child("variance");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    var.shuffle(std::span(order));
    spec.sigma2.assign(n, params.base_variance);
    if (params.profile == VarianceProfile::Geometric) {
        for (std::size_t k = 0; k < n; ++k) {
            const double frac = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
            spec.sigma2[order[k]] = params.base_variance * std::pow(params.spread, frac);
        }
    } else {
        const std::size_t hot = std::min(n, params.hot == 0 ? std::max<std::size_t>(1, n / 4)
                                                            : params.hot);
        for (std::size_t k = 0; k < hot; ++k) {
            spec.sigma2[order[k]] = params.base_variance * params.spread;
        }
    }
    for (const double s2 : spec.sigma2) {
        spec.process_noise.push_back(params.process_noise * s2 * s2);
    }

    // Drift: one step change at the half-way point.
    Rng drift = root.child("drift");
    std::vector<std::size_t> hit(n);
    std::iota(hit.begin(), hit.end(), std::size_t{0});
    drift.shuffle(std::span(hit));
    const auto count = static_cast<std::size_t>(
        std::ceil(params.drift_fraction * static_cast<double>(n) - 1e-12));
    hit.resize(std::min(count, n));
    std::sort(hit.begin(), hit.end());
    for (const auto f : hit) {
        spec.drift.push_back({params.steps / 2, f, params.drift_factor});
    }

    Rng ent = root.child("entropy");
    for (std::size_t i = 0; i < n; ++i) {
        spec.entropy_bits.push_back(pat.entropy_lo +
                                    (pat.entropy_hi - pat.entropy_lo) * ent.uniform());
    }
    return spec;
}

} // namespace maestrocut::tier1
