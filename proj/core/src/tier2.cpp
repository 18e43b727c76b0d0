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

#include "maestrocut/tier2.hpp"

#include "maestrocut/errors.hpp"
#include "maestrocut/rng.hpp"
#include "maestrocut/stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>

namespace maestrocut::tier2 {

void ScenarioConfig::validate() const {
    const bool ok = arrival_rate > 0.0 && burst_multiplier >= 1.0 && burst_on_s > 0.0 &&
                    burst_off_s > 0.0 && servers >= 1 && fragments_per_job >= 1 &&
                    service_mean_ms > 0.0 && service_cv >= 0.0 && result_latency_ms >= 0.0 &&
                    retry_probability >= 0.0 && retry_probability < 1.0 && error_rate >= 0.0 &&
                    error_rate <= 1.0 && injection_rate >= 0.0 && injection_size > 0.0 &&
                    timeout_ms > 0.0 && duration_s > 0.0;
    if (!ok) {
        throw ConfigurationError("scenario '" + name + "' has out-of-range parameters");
    }
}

std::vector<ScenarioConfig> default_scenarios() {
    ScenarioConfig base;
    ScenarioConfig noisy = base;
    noisy.name = "Noisy";
    noisy.service_cv = 1.0;
    noisy.retry_probability = 0.05;
    noisy.error_rate = 0.01;
    ScenarioConfig bursty = base;
    bursty.name = "Bursty";
    bursty.bursty = true;
    ScenarioConfig adversarial = base;
    adversarial.name = "Adversarial";
    adversarial.injection_rate = 2.0;
    adversarial.error_rate = 0.02;
    return {base, noisy, bursty, adversarial};
}

namespace {

struct Task {
    std::int64_t job = -1; ///< -1 for injected work
    double service_ms = 0.0;
};

struct Completion {
    double time = 0.0;
    std::uint64_t seq = 0;
    int server = 0;
    bool operator>(const Completion &o) const {
        return time != o.time ? time > o.time : seq > o.seq;
    }
};

std::vector<double> arrival_times(const ScenarioConfig &sc, Rng rng) {
    const double horizon = sc.duration_s * 1000.0;
    std::vector<double> out;
    if (!sc.bursty) {
        const double rate = sc.arrival_rate / 1000.0;
        for (double t = rng.exponential(rate); t < horizon; t += rng.exponential(rate)) {
            out.push_back(t);
        }
        return out;
    }
    // Thinning-free two-state modulation: regenerate the gap after each state switch,
    // which is exact by memorylessness.
    Rng state_rng = rng.child("state");
    bool on = false;
    double t = 0.0;
    double switch_at = state_rng.exponential(1.0 / (sc.burst_off_s * 1000.0));
    while (t < horizon) {
        const double rate = sc.arrival_rate / 1000.0 * (on ? sc.burst_multiplier : 1.0);
        const double next = t + rng.exponential(rate);
        if (next >= switch_at) {
            t = switch_at;
            on = !on;
            switch_at = t + state_rng.exponential(1.0 / ((on ? sc.burst_on_s : sc.burst_off_s) *
                                                         1000.0));
            continue;
        }
        t = next;
        if (t < horizon) {
            out.push_back(t);
        }
    }
    return out;
}

double service_time(const ScenarioConfig &sc, Rng &rng, double overhead) {
    double total = rng.lognormal_mean_cv(sc.service_mean_ms, sc.service_cv);
    for (int retry = 0; retry < 3 && rng.bernoulli(sc.retry_probability); ++retry) {
        total += rng.lognormal_mean_cv(sc.service_mean_ms, sc.service_cv);
    }
    return total * (1.0 + overhead);
}

} // namespace

std::vector<JobTrace> simulate_trace(const ScenarioConfig &sc, double overhead,
                                     std::uint64_t seed, std::uint64_t episode, bool backlog) {
    sc.validate();
    if (!(overhead >= 0.0)) {
        throw DomainError("overhead must be nonnegative");
    }
    // Streams are keyed by episode and job, not by scenario, so scenarios pair
    // draw-for-draw on the processes they share.
    const Rng root = master_stream(seed).child("tier2").child(episode);
    std::vector<double> admitted = arrival_times(sc, root.child("arrivals"));
    std::vector<double> injections;
    if (sc.injection_rate > 0.0 && !backlog) {
        Rng inj = root.child("injections");
        const double rate = sc.injection_rate / 1000.0;
        for (double t = inj.exponential(rate); t < sc.duration_s * 1000.0;
             t += inj.exponential(rate)) {
            injections.push_back(t);
        }
    }
    if (backlog) {
        std::fill(admitted.begin(), admitted.end(), 0.0);
    }

    const std::size_t jobs = admitted.size();
    const auto m = static_cast<std::size_t>(sc.fragments_per_job);
    std::vector<JobTrace> trace(jobs);
    std::vector<std::size_t> remaining(jobs, m);
    const Rng service_root = root.child("service");
    const Rng error_root = root.child("errors");
    Rng injected_service = root.child("injected-service");
    for (std::size_t j = 0; j < jobs; ++j) {
        trace[j].admitted_ms = admitted[j];
        trace[j].first_result_ms = std::numeric_limits<double>::infinity();
        Rng e = error_root.child(j);
        trace[j].error = e.bernoulli(sc.error_rate);
    }

    std::deque<Task> queue;
    std::vector<char> busy(static_cast<std::size_t>(sc.servers), 0);
    std::vector<Task> running(static_cast<std::size_t>(sc.servers));
    std::priority_queue<Completion, std::vector<Completion>, std::greater<>> completions;
    std::uint64_t seq = 0;
    double now = 0.0;

    auto start_work = [&]() {
        for (std::size_t s = 0; s < busy.size() && !queue.empty(); ++s) {
            if (busy[s] == 0) {
                running[s] = queue.front();
                queue.pop_front();
                busy[s] = 1;
                completions.push({now + running[s].service_ms, seq++, static_cast<int>(s)});
            }
        }
    };

    std::size_t next_job = 0;
    std::size_t next_injection = 0;
    while (next_job < jobs || next_injection < injections.size() || !completions.empty()) {
        const double t_job = next_job < jobs ? admitted[next_job]
                                             : std::numeric_limits<double>::infinity();
        const double t_inj = next_injection < injections.size()
                                 ? injections[next_injection]
                                 : std::numeric_limits<double>::infinity();
        const double t_done =
            completions.empty() ? std::numeric_limits<double>::infinity() : completions.top().time;
        // Completions first at equal times, then admissions, then injections.
        if (t_done <= t_job && t_done <= t_inj) {
            const Completion c = completions.top();
            completions.pop();
            now = c.time;
            const auto s = static_cast<std::size_t>(c.server);
            busy[s] = 0;
            const Task &task = running[s];
            if (task.job >= 0) {
                auto &jt = trace[static_cast<std::size_t>(task.job)];
                const double result = now + sc.result_latency_ms;
                jt.first_result_ms = std::min(jt.first_result_ms, result);
                if (--remaining[static_cast<std::size_t>(task.job)] == 0) {
                    jt.completed_ms = result;
                }
            }
        } else if (t_job <= t_inj) {
            now = t_job;
            Rng svc = service_root.child(next_job);
            for (std::size_t f = 0; f < m; ++f) {
                queue.push_back({static_cast<std::int64_t>(next_job), service_time(sc, svc, overhead)});
            }
            ++next_job;
        } else {
            now = t_inj;
            const double size = service_time(sc, injected_service, overhead) * sc.injection_size;
            queue.push_front({-1, size});
            ++next_injection;
        }
        start_work();
    }
    return trace;
}

RunMetrics summarise(std::span<const JobTrace> jobs, const ScenarioConfig &sc, double overhead) {
    RunMetrics m;
    m.phasepad_overhead = overhead;
    m.jobs = jobs.size();
    if (jobs.empty()) {
        m.success_fraction = 1.0;
        return m;
    }
    std::vector<std::size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return jobs[a].completed_ms < jobs[b].completed_ms;
    });
    std::vector<double> diffs;
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto &a = jobs[order[k - 1]];
        const auto &b = jobs[order[k]];
        diffs.push_back(std::abs((b.completed_ms - b.admitted_ms) -
                                 (a.completed_ms - a.admitted_ms)));
    }
    m.jitter_ms = diffs.empty() ? 0.0 : stats::median(diffs);

    std::vector<double> ttfr;
    std::size_t success = 0;
    std::size_t timeout = 0;
    std::size_t error = 0;
    double first = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (const auto &j : jobs) {
        ttfr.push_back(j.first_result_ms - j.admitted_ms);
        if (j.completed_ms - j.admitted_ms > sc.timeout_ms) {
            ++timeout;
        } else if (j.error) {
            ++error;
        } else {
            ++success;
        }
        first = std::min(first, j.admitted_ms);
        last = std::max(last, j.completed_ms);
    }
    m.ttfr_ms = stats::median(ttfr);
    const auto n = static_cast<double>(jobs.size());
    m.success_fraction = static_cast<double>(success) / n;
    m.timeout_fraction = static_cast<double>(timeout) / n;
    m.error_fraction = static_cast<double>(error) / n;
    const double span_s = std::max(last - first, 1e-9) / 1000.0;
    m.qps_raw = n / span_s;
    m.qps_success = static_cast<double>(success) / span_s;
    return m;
}

std::vector<RunMetrics> simulate_queue(const ScenarioConfig &scenario, int episodes,
                                       std::uint64_t seed, double overhead) {
    if (episodes < 1) {
        throw DomainError("need at least one episode");
    }
    std::vector<RunMetrics> out;
    for (int e = 0; e < episodes; ++e) {
        const auto trace = simulate_trace(scenario, overhead, seed, static_cast<std::uint64_t>(e));
        out.push_back(summarise(trace, scenario, overhead));
    }
    return out;
}

std::vector<double> overhead_sweep(const ScenarioConfig &scenario, std::span<const double> levels,
                                   std::uint64_t seed, int episodes) {
    for (const double level : levels) {
        if (!(level >= 0.0 && level <= 0.05)) {
            throw DomainError("overhead levels must lie in [0, 0.05]");
        }
    }
    auto throughput = [&](double level) {
        double total = 0.0;
        for (int e = 0; e < episodes; ++e) {
            const auto trace =
                simulate_trace(scenario, level, seed, static_cast<std::uint64_t>(e), true);
            total += summarise(trace, scenario, level).qps_raw;
        }
        return total;
    };
    const double reference = throughput(0.0);
    std::vector<double> out;
    for (const double level : levels) {
        out.push_back(level == 0.0 ? 1.0 : throughput(level) / reference);
    }
    return out;
}

std::vector<report::DashboardEntry> evaluate_slos(const std::string &scenario,
                                                  std::span<const RunMetrics> metrics,
                                                  const report::Targets &targets, int resamples,
                                                  std::uint64_t seed) {
    if (metrics.size() < static_cast<std::size_t>(kMinEpisodes)) {
        throw DomainError("SLO evaluation needs at least " + std::to_string(kMinEpisodes) +
                          " episodes, got " + std::to_string(metrics.size()));
    }
    auto column = [&](double RunMetrics::*field) {
        std::vector<double> v;
        for (const auto &m : metrics) {
            v.push_back(m.*field);
        }
        return v;
    };
    using report::Statistic;
    std::vector<report::DashboardEntry> out;
    auto add = [&](const char *name, double RunMetrics::*field, const char *cmp, double target) {
        out.push_back(report::evaluate_target("tier2", scenario, name, column(field),
                                              Statistic::Median, cmp, target, resamples, seed));
    };
    add("jitter_ms", &RunMetrics::jitter_ms, "<=", targets.jitter_max_ms);
    add("ttfr_ms", &RunMetrics::ttfr_ms, "<=", targets.ttfr_max_ms);
    add("success_fraction", &RunMetrics::success_fraction, ">=", targets.success_min);
    add("timeout_fraction", &RunMetrics::timeout_fraction, "<=", targets.timeout_max);
    add("error_fraction", &RunMetrics::error_fraction, "<=", targets.error_max);
    add("phasepad_overhead", &RunMetrics::phasepad_overhead, "<=", targets.overhead_max);
    return out;
}

} // namespace maestrocut::tier2
