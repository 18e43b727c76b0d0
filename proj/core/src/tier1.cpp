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

#include "maestrocut/tier1.hpp"

#include "maestrocut/drifttrack.hpp"
#include "maestrocut/errors.hpp"
#include "maestrocut/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <utility>

namespace maestrocut::tier1 {

Policy parse_policy(const std::string &text) {
    if (text == "Uniform") {
        return Policy::Uniform;
    }
    if (text == "Proportional") {
        return Policy::Proportional;
    }
    if (text == "TopoGP") {
        return Policy::TopoGP;
    }
    throw ConfigurationError("unknown policy '" + text + "'");
}

const char *to_string(Policy p) noexcept {
    switch (p) {
    case Policy::Uniform:
        return "Uniform";
    case Policy::Proportional:
        return "Proportional";
    case Policy::TopoGP:
        return "TopoGP";
    }
    return "?";
}

const std::vector<Policy> &all_policies() {
    static const std::vector<Policy> policies = {Policy::Uniform, Policy::Proportional,
                                                 Policy::TopoGP};
    return policies;
}

void EpisodeConfig::validate(std::size_t fragments) const {
    const auto n = static_cast<Shots>(fragments);
    if (steps < 1 || s_min < 2 || shots_per_step < n * s_min) {
        throw ConfigurationError("episode needs steps >= 1, s_min >= 2 and S >= n * s_min");
    }
    if (cadence < 1 || cadence > shots_per_step) {
        throw ConfigurationError("cadence must lie in [1, S]");
    }
    if (!(rho > 0.0 && rho < 1.0) || !(cusum_kappa >= 0.0) || !(arl_per_fragment > 0.0) ||
        !(cusum_h >= 0.0) || warmup < 1 || refine_passes < 0 ||
        !(pilot_fraction >= 0.0 && pilot_fraction < 1.0)) {
        throw ConfigurationError("episode tracking parameters out of range");
    }
    weights.validate();
    fit.validate();
    security.validate();
}

std::vector<double> evolve_truth(const std::vector<double> &truth, int t,
                                 const WorkloadSpec &spec, Rng &rng) {
    if (truth.size() != spec.fragments) {
        throw DomainError("truth vector does not match the workload");
    }
    std::vector<double> next(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double q = spec.process_noise[i];
        const double w = q > 0.0 ? rng.normal(0.0, std::sqrt(q)) : 0.0;
        next[i] = std::max(0.0, truth[i] + w);
    }
    for (const auto &d : spec.drift) {
        if (d.step == t) {
            next.at(d.fragment) *= d.factor;
        }
    }
    return next;
}

std::vector<double> observe(const std::vector<double> &truth, std::span<const Shots> plan,
                            const Rng &rng) {
    if (plan.size() != truth.size()) {
        throw DomainError("plan and truth differ in length");
    }
    std::vector<double> z(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (plan[i] < 1) {
            throw DomainError("every fragment needs at least one shot");
        }
        const double sd = std::sqrt(truth[i]);
        Rng r = rng.child(static_cast<std::uint64_t>(i));
        if (plan[i] == 1) {
            const double x = sd * r.normal();
            z[i] = x * x;
            continue;
        }
        // Welford
        double mean = 0.0;
        double m2 = 0.0;
        for (Shots k = 0; k < plan[i]; ++k) {
            const double x = sd * r.normal();
            const double delta = x - mean;
            mean += delta / static_cast<double>(k + 1);
            m2 += delta * (x - mean);
        }
        z[i] = m2 / static_cast<double>(plan[i] - 1);
    }
    return z;
}

std::vector<NodeId> block_anchors(const cutgraph::Hypergraph &hg, const cutgraph::Partition &part,
                                  const WorkloadSpec &spec, const Topology &topo) {
    const std::size_t k = part.num_blocks();
    std::vector<std::set<NodeId>> nodes(k);
    for (std::size_t v = 0; v < hg.num_vertices(); ++v) {
        for (const int q : hg.gate(static_cast<cutgraph::VertexIndex>(v)).qubits) {
            nodes[part.assignment[v]].insert(spec.qubit_nodes.at(static_cast<std::size_t>(q)));
        }
    }
    std::vector<NodeId> anchors(k);
    for (std::size_t b = 0; b < k; ++b) {
        if (nodes[b].empty()) {
            // An empty block keeps the position of its home qubit group.
            const auto home = std::min(spec.qubit_nodes.size() - 1,
                                       b * spec.qubit_nodes.size() / std::max<std::size_t>(1, k));
            anchors[b] = spec.qubit_nodes[home];
            continue;
        }
        long best = std::numeric_limits<long>::max();
        for (const NodeId c : nodes[b]) {
            long total = 0;
            for (const NodeId o : nodes[b]) {
                total += topo.distance(c, o);
            }
            if (total < best) {
                best = total;
                anchors[b] = c;
            }
        }
    }
    return anchors;
}

double stitched_variance(std::span<const double> truth, std::span<const Shots> plan,
                         const Topology &topo, std::span<const NodeId> anchors,
                         const alloc::KernelParams &kernel, double rho) {
    const std::size_t n = truth.size();
    if (plan.size() != n || anchors.size() != n) {
        throw DomainError("stitched variance needs one shot count and anchor per fragment");
    }
    const auto tail = alloc::TailParams::for_batch(rho, n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = alloc::tail_factor(std::sqrt(truth[i]), tail) / static_cast<double>(plan[i]);
    }
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v += y[i] * y[i] * alloc::kernel(0.0, kernel);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = alloc::kernel(topo.distance(anchors[i], anchors[j]), kernel);
            v += 2.0 * y[i] * y[j] * k;
        }
    }
    return v;
}

double trigger_threshold(double kappa, double target_arl0) {
    static std::mutex mutex;
    static std::map<std::pair<double, double>, double> cache;
    const std::lock_guard lock(mutex);
    const auto key = std::make_pair(kappa, target_arl0);
    if (const auto it = cache.find(key); it != cache.end()) {
        return it->second;
    }
    const drift::NullSampler half_normal = [](Rng &r) { return std::abs(r.normal()); };
    const auto cal = drift::calibrate_cusum_threshold(kappa, target_arl0, half_normal,
                                                      0x74726967676572ULL, 500);
    cache.emplace(key, cal.h);
    return cal.h;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

phasepad::Bytes to_bytes(const std::string &s) { return {s.begin(), s.end()}; }

/// Per-block payload: the block's gates as text.
std::vector<phasepad::Fragment> fragment_payloads(const cutgraph::Hypergraph &hg,
                                                  const cutgraph::Partition &part,
                                                  std::span<const Shots> plan) {
    std::vector<std::string> text(part.num_blocks());
    for (std::size_t v = 0; v < hg.num_vertices(); ++v) {
        const auto &g = hg.gate(static_cast<cutgraph::VertexIndex>(v));
        auto &out = text[part.assignment[v]];
        out += g.id;
        for (const int q : g.qubits) {
            out += ' ' + std::to_string(q);
        }
        out += " d" + std::to_string(g.depth) + ';';
    }
    std::vector<phasepad::Fragment> frags;
    for (std::size_t b = 0; b < text.size(); ++b) {
        if (text[b].empty()) {
            text[b] = "empty";
        }
        frags.push_back({static_cast<std::uint32_t>(b), to_bytes(text[b]),
                         to_bytes("fragment " + std::to_string(b) + " shots " +
                                  std::to_string(plan[b])),
                         plan[b]});
    }
    return frags;
}

std::size_t sample_categorical(const std::vector<double> &p, Rng &rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        acc += p[k];
        if (u < acc) {
            return k;
        }
    }
    return p.size() - 1;
}

} // namespace

EpisodeResult run_episode(const WorkloadSpec &spec, const EpisodeConfig &cfg) {
    const auto start = Clock::now();
    const std::size_t n = spec.fragments;
    cfg.validate(n);

    EpisodeResult result;
    result.workload = spec.name;
    result.policy = cfg.policy;
    result.seed = cfg.seed;

    // Streams shared by every policy arm of this (workload, seed).
    const Rng root = master_stream(cfg.seed).child("tier1").child(spec.name);
    Rng truth_rng = root.child("truth");
    const Rng obs_root = root.child("obs");
    const Rng pilot_root = root.child("pilot");
    const Rng err_root = root.child("err");
    Rng pad_rng = root.child("phasepad");

    const Topology topo = Topology::from_spec(spec.topology);
    const auto hg = cutgraph::Hypergraph::from_circuit(spec.gates);
    cutgraph::ObjectiveSpec objective;
    objective.weights = cfg.weights;
    objective.queue.per_gate_ms.assign(n, 1.0);
    cutgraph::MovingReference e_ref;
    cutgraph::MovingReference q_ref;
    auto partition = cutgraph::initial_partition(
        hg, cutgraph::uniform_caps(n, spec.block_qubit_cap, spec.block_depth_cap),
        hg.num_edges(), objective, root.child("partition")());
    auto anchors = block_anchors(hg, partition, spec, topo);

    const double h = cfg.cusum_h > 0.0
                         ? cfg.cusum_h
                         : trigger_threshold(cfg.cusum_kappa,
                                             cfg.arl_per_fragment * static_cast<double>(n));
    result.cusum_h = h;
    drift::CusumBank bank(std::vector<drift::CusumConfig>(n, {cfg.cusum_kappa, h}));

    std::vector<std::vector<double>> entropy_dists;
    for (const double e : spec.entropy_bits) {
        entropy_dists.push_back(outcome_distribution(e));
    }

    alloc::ShotPlan plan = alloc::uniform_plan(n, cfg.shots_per_step, cfg.s_min);
    alloc::CadenceTracker cadence(cfg.cadence);
    std::vector<drift::KalmanState> states(n);
    std::vector<double> q(n, 0.0);
    std::vector<std::vector<double>> warmup(n);
    phasepad::AuditLog audit;

    auto dispatch = [&](std::uint64_t batch_id) {
        if (!cfg.phasepad_enabled) {
            return;
        }
        const auto t0 = Clock::now();
        const auto frags = fragment_payloads(hg, partition, plan.shots);
        const auto t1 = Clock::now();
        auto batch = phasepad::dispatch(frags, cfg.security, batch_id, pad_rng);
        result.mask_seal_seconds += seconds_since(t1);
        const auto replies = phasepad::echo_backend(batch.envelopes);
        const auto report =
            phasepad::verify_and_recover(replies, cfg.security, batch.records, audit, cfg.seed);
        result.phasepad_seconds += seconds_since(t0);
        ++result.dispatches;
        if (report.decision == phasepad::Decision::Abort) {
            ++result.aborts;
        }
    };
    dispatch(0);

    std::vector<double> truth = spec.sigma2;
    for (int t = 0; t < cfg.steps; ++t) {
        if (t > 0) {
            Rng step_rng = truth_rng.child(static_cast<std::uint64_t>(t));
            truth = evolve_truth(truth, t, spec, step_rng);
        }
        StepRecord rec;
        rec.step = t;
        rec.plan = plan.shots;
        rec.truth = truth;
        rec.observation = observe(truth, plan.shots, obs_root.child(static_cast<std::uint64_t>(t)));
        rec.innovation.assign(n, 0.0);

        for (std::size_t i = 0; i < n; ++i) {
            const double z = rec.observation[i];
            const double s = static_cast<double>(plan.shots[i]);
            if (t == 0) {
                states[i] = {z, 2.0 * z * z / (s - 1.0)};
                warmup[i].push_back(z);
                continue;
            }
            const double m = states[i].mean;
            const double r = 2.0 * m * m / (s - 1.0);
            double qi = q[i];
            if (t < cfg.warmup) {
                warmup[i].push_back(z);
                qi = warmup[i].size() >= 3 ? drift::calibrate_process_noise(warmup[i]) : r;
                if (t == cfg.warmup - 1) {
                    q[i] = qi;
                }
            }
            const double p_prior = states[i].p + qi;
            const double denom = std::sqrt(p_prior + r);
            rec.innovation[i] = denom > 0.0 ? std::abs(z - m) / denom : 0.0;
            states[i] = drift::kalman_step(states[i], z, {qi, r});
        }
        if (t >= cfg.warmup) {
            rec.trigger = bank.update(rec.innovation);
        }

        if (rec.trigger >= 0) {
            // Restart the filter of the fragment that changed.
            const auto i = static_cast<std::size_t>(rec.trigger);
            const double z = rec.observation[i];
            states[i] = {z, 2.0 * z * z / (static_cast<double>(plan.shots[i]) - 1.0)};

            for (std::size_t b = 0; b < n; ++b) {
                objective.queue.per_gate_ms[b] = std::max(states[b].mean, 1e-12);
            }
            const auto sizes = cutgraph::block_sizes(hg, partition);
            e_ref.observe(std::max(1.0, cutgraph::ebits(hg, partition)));
            q_ref.observe(std::max(1e-12, objective.queue.expected_delay(sizes)));
            objective.refs.e_ref = e_ref.value();
            objective.refs.q_ref = q_ref.value();
            auto refined = cutgraph::fm_refine(hg, partition, objective, cfg.refine_passes);
            if (refined.assignment != partition.assignment) {
                partition = std::move(refined);
                anchors = block_anchors(hg, partition, spec, topo);
                rec.repartitioned = true;
            }
        }

        // Estimator cascade and realised error.
        rec.choices.resize(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Shots s = plan.shots[i];
            const Shots pilot = cascade::pilot_shots(s, cfg.pilot_fraction);
            const double s_eff = static_cast<double>(std::max<Shots>(1, s - pilot));
            Rng pr = pilot_root.child(static_cast<std::uint64_t>(t)).child(i);
            std::vector<std::uint64_t> counts(entropy_dists[i].size(), 0);
            for (Shots k = 0; k < pilot; ++k) {
                ++counts[sample_categorical(entropy_dists[i], pr)];
            }
            const double h_hat = pilot > 0 ? cascade::pilot_entropy(counts) : 0.0;
            const auto choice = cfg.cascade_enabled
                                    ? cascade::choose_estimator(cfg.fit, s_eff, h_hat)
                                    : cascade::Estimator::Shadows;
            rec.choices[i] = choice;
            const auto mse = cascade::predict_mse(cfg.fit, s_eff, spec.entropy_bits[i]);
            const double m = choice == cascade::Estimator::MLE ? mse.mle : mse.shadows;
            Rng er = err_root.child(static_cast<std::uint64_t>(t)).child(i);
            const double e = std::sqrt(m) * er.normal();
            sq += e * e;
        }
        rec.squared_error = sq / static_cast<double>(n);
        rec.stitched_variance =
            stitched_variance(truth, plan.shots, topo, anchors, cfg.kernel, cfg.rho);
        for (std::size_t i = 0; i < n; ++i) {
            rec.kalman_mean.push_back(states[i].mean);
        }
        const bool repartitioned = rec.repartitioned;
        result.steps.push_back(std::move(rec));

        // Plan for the next step.
        if (cadence.record(cfg.shots_per_step) > 0) {
            ++result.reallocations;
            switch (cfg.policy) {
            case Policy::Uniform:
                plan = alloc::uniform_plan(n, cfg.shots_per_step, cfg.s_min);
                break;
            case Policy::Proportional: {
                std::vector<double> sd(n);
                for (std::size_t i = 0; i < n; ++i) {
                    sd[i] = std::sqrt(std::max(0.0, states[i].mean));
                }
                plan = alloc::proportional_plan(sd, cfg.shots_per_step, cfg.s_min);
                break;
            }
            case Policy::TopoGP:
                plan = alloc::allocate(states, topo, anchors, cfg.kernel, cfg.rho,
                                       cfg.shots_per_step, cfg.s_min)
                           .plan;
                break;
            }
        }
        if (repartitioned) {
            dispatch(static_cast<std::uint64_t>(t) + 1);
        }
    }
    result.total_seconds = seconds_since(start);
    return result;
}

EpisodeMetrics episode_metrics(const EpisodeResult &policy, const EpisodeResult &uniform) {
    if (policy.workload != uniform.workload || policy.seed != uniform.seed ||
        policy.steps.size() != uniform.steps.size() || policy.steps.empty()) {
        throw PairingError("episode results are not paired (workload, seed or horizon differ)");
    }
    double vp = 0.0;
    double vu = 0.0;
    for (std::size_t t = 0; t < policy.steps.size(); ++t) {
        vp += policy.steps[t].stitched_variance;
        vu += uniform.steps[t].stitched_variance;
    }
    EpisodeMetrics m;
    m.contraction = vu > 0.0 ? vp / vu : 1.0;
    const auto &last = policy.steps.back();
    std::vector<double> shots(last.plan.begin(), last.plan.end());
    m.p95_tail = stats::quantile(shots, 0.95);
    m.final_mse = last.squared_error;
    return m;
}

} // namespace maestrocut::tier1
