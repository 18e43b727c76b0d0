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

#include "maestrocut_tools/cli.hpp"

#include <maestrocut/errors.hpp>
#include <maestrocut/stats.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <iostream>
#include <thread>

namespace maestrocut::cli {

namespace {

/// Runs task(i) for i in [0, count) on `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)> &task) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1 || count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, count); ++t) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::string level_label(double level) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", level);
    return buf;
}

void write_echo(const RunConfig &cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    report::write_text(cfg.out_dir / "config_echo.json", cfg.tree.dump(2) + "\n");
}

report::DashboardSpec dashboard_spec(const RunConfig &cfg) {
    report::DashboardSpec spec;
    spec.targets = targets(cfg);
    spec.reference_workload = cfg.tree["tier1"]["reference_workload"].get<std::string>();
    spec.resamples = cfg.tree["report"]["resamples"].get<int>();
    spec.seed = cfg.seed;
    spec.scenarios.clear();
    for (const auto &s : tier2_scenarios(cfg)) {
        spec.scenarios.push_back(s.name);
    }
    return spec;
}

int finish_dashboard(const RunConfig &cfg, std::vector<report::MetricRow> t1,
                     std::vector<report::MetricRow> t2, std::ostream &log) {
    const auto entries = report::dashboard(t1, t2, dashboard_spec(cfg));
    report::emit(std::move(t1), std::move(t2), entries, cfg.out_dir);
    for (const auto &e : entries) {
        log << e.tier << ' ' << e.scope << ' ' << e.metric << ' ' << e.comparator << ' '
            << e.target << " : ";
        if (e.estimate) {
            log << e.estimate->value << " [" << e.estimate->lower << ", " << e.estimate->upper
                << "] ";
        }
        log << report::to_string(e.status) << '\n';
    }
    const bool ok = report::all_pass(entries);
    log << "dashboard: " << (ok ? "pass" : "fail") << '\n';
    return ok ? 0 : 1;
}

} // namespace

Tier1Output run_tier1(const RunConfig &cfg) {
    const auto workloads = tier1_workloads(cfg);
    const auto policies = tier1_policies(cfg);
    const auto seeds = static_cast<std::size_t>(cfg.tree["tier1"]["seeds"].get<int>());
    const tier1::EpisodeConfig base = episode_config(cfg);

    struct TaskOut {
        std::vector<report::MetricRow> rows;
        double phasepad = 0.0;
        double mask_seal = 0.0;
        double total = 0.0;
    };
    std::vector<TaskOut> outs(workloads.size() * seeds);
    parallel_for(outs.size(), cfg.jobs, [&](std::size_t task) {
        const auto &name = workloads[task / seeds];
        const std::size_t index = task % seeds;
        const std::uint64_t seed = episode_seed(cfg.seed, index);
        const auto spec = tier1::synth_workload(name, seed, workload_params(cfg, name));
        tier1::EpisodeConfig ec = base;
        ec.seed = seed;
        ec.policy = tier1::Policy::Uniform;
        const auto uniform = tier1::run_episode(spec, ec);
        auto &out = outs[task];
        for (const auto policy : policies) {
            tier1::EpisodeResult arm;
            if (policy == tier1::Policy::Uniform) {
                arm = uniform;
            } else {
                ec.policy = policy;
                arm = tier1::run_episode(spec, ec);
            }
            out.phasepad += arm.phasepad_seconds;
            out.mask_seal += arm.mask_seal_seconds;
            out.total += arm.total_seconds;
            const auto m = tier1::episode_metrics(arm, uniform);
            double mean_v = 0.0;
            int triggers = 0;
            int repartitions = 0;
            for (const auto &s : arm.steps) {
                mean_v += s.stitched_variance;
                triggers += s.trigger >= 0 ? 1 : 0;
                repartitions += s.repartitioned ? 1 : 0;
            }
            mean_v /= static_cast<double>(arm.steps.size());
            auto row = [&](const char *metric, double value, const char *units) {
                out.rows.push_back({"tier1", name, tier1::to_string(policy), index, metric, value,
                                    units});
            };
            row("contraction", m.contraction, "ratio");
            row("p95_tail_shots", m.p95_tail, "shots");
            row("final_mse", m.final_mse, "mse");
            row("mean_stitched_variance", mean_v, "variance");
            row("triggers", triggers, "count");
            row("repartitions", repartitions, "count");
            row("dispatches", arm.dispatches, "count");
            row("aborts", arm.aborts, "count");
        }
    });
    Tier1Output result;
    for (auto &o : outs) {
        result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
        result.phasepad_seconds += o.phasepad;
        result.mask_seal_seconds += o.mask_seal;
        result.episode_seconds += o.total;
    }
    report::normalise(result.rows);
    return result;
}

std::vector<report::MetricRow> run_tier2(const RunConfig &cfg) {
    const auto scenarios = tier2_scenarios(cfg);
    const int episodes = cfg.tree["tier2"]["episodes"].get<int>();
    const double overhead = cfg.tree["tier2"]["overhead"].get<double>();
    const auto levels = cfg.tree["tier2"]["sweep_levels"].get<std::vector<double>>();
    const int sweep_episodes = cfg.tree["tier2"]["sweep_episodes"].get<int>();
    if (!(overhead >= 0.0)) {
        throw ConfigurationError("config key 'tier2.overhead' must be nonnegative");
    }
    std::vector<std::vector<report::MetricRow>> outs(scenarios.size());
    parallel_for(scenarios.size(), cfg.jobs, [&](std::size_t k) {
        const auto &sc = scenarios[k];
        const auto metrics = tier2::simulate_queue(sc, episodes, cfg.seed, overhead);
        auto &rows = outs[k];
        for (std::size_t e = 0; e < metrics.size(); ++e) {
            const auto &m = metrics[e];
            auto row = [&](const char *metric, double value, const char *units) {
                rows.push_back({"tier2", sc.name, "-", e, metric, value, units});
            };
            row("jitter_ms", m.jitter_ms, "ms");
            row("ttfr_ms", m.ttfr_ms, "ms");
            row("success_fraction", m.success_fraction, "fraction");
            row("timeout_fraction", m.timeout_fraction, "fraction");
            row("error_fraction", m.error_fraction, "fraction");
            row("qps_raw", m.qps_raw, "jobs/s");
            row("qps_success", m.qps_success, "jobs/s");
            row("phasepad_overhead", m.phasepad_overhead, "fraction");
        }
        const auto rel = tier2::overhead_sweep(sc, levels, cfg.seed, sweep_episodes);
        for (std::size_t i = 0; i < levels.size(); ++i) {
            rows.push_back({"tier2", sc.name, "overhead_sweep", cfg.seed,
                            "relative_throughput@" + level_label(levels[i]), rel[i], "ratio"});
        }
    });
    std::vector<report::MetricRow> rows;
    for (auto &o : outs) {
        rows.insert(rows.end(), o.begin(), o.end());
    }
    report::normalise(rows);
    return rows;
}

int run(const std::string &subcommand, const RunConfig &cfg, std::ostream &log) {
    try {
        if (subcommand == "selftest") {
            return selftest(log) ? 0 : 1;
        }
        if (subcommand == "tier1" || subcommand == "tier2" || subcommand == "suite") {
            write_echo(cfg);
            std::vector<report::MetricRow> t1;
            std::vector<report::MetricRow> t2;
            if (subcommand != "tier2") {
                auto out = run_tier1(cfg);
                t1 = std::move(out.rows);
                report::write_text(cfg.out_dir / "tier1_metrics.csv", report::to_csv(t1));
                // Wall-clock measurements vary run to run, so they stay out of the CSVs.
                const double total = out.episode_seconds > 0.0 ? out.episode_seconds : 1.0;
                const Json timing = {{"episode_seconds", out.episode_seconds},
                                     {"phasepad_seconds", out.phasepad_seconds},
                                     {"mask_seal_seconds", out.mask_seal_seconds},
                                     {"phasepad_share", out.phasepad_seconds / total},
                                     {"mask_seal_share", out.mask_seal_seconds / total}};
                report::write_text(cfg.out_dir / "timing.json", timing.dump(2) + "\n");
                log << "tier1: " << t1.size() << " rows\n";
            }
            if (subcommand != "tier1") {
                t2 = run_tier2(cfg);
                report::write_text(cfg.out_dir / "tier2_metrics.csv", report::to_csv(t2));
                log << "tier2: " << t2.size() << " rows\n";
            }
            if (subcommand == "suite") {
                return finish_dashboard(cfg, std::move(t1), std::move(t2), log);
            }
            return 0;
        }
        if (subcommand == "report") {
            auto t1 = report::parse_csv(report::read_text(cfg.out_dir / "tier1_metrics.csv"));
            auto t2 = report::parse_csv(report::read_text(cfg.out_dir / "tier2_metrics.csv"));
            return finish_dashboard(cfg, std::move(t1), std::move(t2), log);
        }
        log << "error: unknown subcommand '" << subcommand << "'\n";
        return 2;
    } catch (const std::exception &e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
}

int main_entry(int argc, char **argv) {
    CLI::App app{"maestrocut: adaptive cut-circuit orchestration experiments"};
    app.require_subcommand(1);
    std::string config_path;
    std::uint64_t seed = 0;
    int seeds = 0;
    std::string out;
    std::string scenario;
    std::string policy;
    double overhead = 0.0;
    int jobs = 0;
    std::string run_id;
    auto *o_config = app.add_option("--config", config_path, "JSON config file");
    auto *o_seed = app.add_option("--seed", seed, "master seed");
    auto *o_seeds = app.add_option("--seeds", seeds, "Tier-1 seeds per workload");
    auto *o_out = app.add_option("--out", out, "output root (default $MAESTROCUT_OUT or out)");
    auto *o_scenario = app.add_option("--scenario", scenario, "restrict Tier-2 to one scenario");
    auto *o_policy = app.add_option("--policy", policy, "restrict Tier-1 to one policy");
    auto *o_overhead = app.add_option("--overhead", overhead, "PhasePad overhead fraction");
    auto *o_jobs = app.add_option("--jobs", jobs, "worker threads");
    auto *o_run = app.add_option("--run-id", run_id, "output subdirectory name");
    for (const char *name : {"tier1", "tier2", "suite", "selftest", "report"}) {
        app.add_subcommand(name)->fallthrough();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        FlagOverrides flags;
        if (o_seed->count() > 0) flags.seed = seed;
        if (o_seeds->count() > 0) flags.seeds = seeds;
        if (o_out->count() > 0) flags.out = out;
        if (o_scenario->count() > 0) flags.scenario = scenario;
        if (o_policy->count() > 0) flags.policy = policy;
        if (o_overhead->count() > 0) flags.overhead = overhead;
        if (o_jobs->count() > 0) flags.jobs = jobs;
        if (o_run->count() > 0) flags.run_id = run_id;
        std::optional<std::filesystem::path> file;
        if (o_config->count() > 0) {
            file = config_path;
        }
        const RunConfig cfg = resolve_config(file, flags);
        return run(sub, cfg, std::cout);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace maestrocut::cli
