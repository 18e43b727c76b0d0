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

#include "maestrocut/report.hpp"

#include "maestrocut/errors.hpp"
#include "maestrocut/rng.hpp"
#include "maestrocut/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace maestrocut::report {

namespace {

double statistic_of(std::span<const double> xs, Statistic s) {
    return s == Statistic::Mean ? stats::mean(xs) : stats::median(xs);
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

auto key_of(const MetricRow &r) {
    return std::tie(r.tier, r.name, r.policy, r.seed, r.metric);
}

} // namespace

BootstrapCI bootstrap_ci(std::span<const double> samples, Statistic statistic, int resamples,
                         double level, std::uint64_t seed) {
    if (samples.size() < 2) {
        throw DomainError("bootstrap needs at least two samples");
    }
    if (resamples < 1 || !(level > 0.0 && level < 1.0)) {
        throw DomainError("bootstrap needs resamples >= 1 and level in (0, 1)");
    }
    Rng rng = master_stream(seed).child("bootstrap");
    const auto n = samples.size();
    std::vector<double> draw(n);
    std::vector<double> stats_out(static_cast<std::size_t>(resamples));
    for (auto &out : stats_out) {
        for (auto &d : draw) {
            d = samples[static_cast<std::size_t>(rng.uniform_int(n))];
        }
        out = statistic_of(draw, statistic);
    }
    BootstrapCI ci;
    ci.value = statistic_of(samples, statistic);
    ci.level = level;
    ci.resamples = resamples;
    const double alpha = 1.0 - level;
    ci.lower = std::min(ci.value, stats::quantile(stats_out, alpha / 2.0));
    ci.upper = std::max(ci.value, stats::quantile(stats_out, 1.0 - alpha / 2.0));
    return ci;
}

void normalise(std::vector<MetricRow> &rows) {
    std::sort(rows.begin(), rows.end(),
              [](const MetricRow &a, const MetricRow &b) { return key_of(a) < key_of(b); });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (key_of(rows[i - 1]) == key_of(rows[i])) {
            throw DomainError("duplicate metric row " + rows[i].tier + "/" + rows[i].name + "/" +
                              rows[i].policy + "/" + std::to_string(rows[i].seed) + "/" +
                              rows[i].metric);
        }
    }
}

std::string to_csv(std::span<const MetricRow> rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto &r : rows) {
        out += r.tier + ',' + r.name + ',' + r.policy + ',' + std::to_string(r.seed) + ',' +
               r.metric + ',' + format_double(r.value) + ',' + r.units + '\n';
    }
    return out;
}

std::vector<MetricRow> parse_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ParseError("metrics CSV must start with the header '" + std::string(kCsvHeader) +
                         "'");
    }
    std::vector<MetricRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) {
            fields.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            fields.emplace_back();
        }
        if (fields.size() != 7) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 7 fields");
        }
        try {
            rows.push_back({fields[0], fields[1], fields[2], std::stoull(fields[3]), fields[4],
                            std::stod(fields[5]), fields[6]});
        } catch (const std::logic_error &) {
            throw ParseError("line " + std::to_string(line_no) + ": bad seed or value");
        }
    }
    return rows;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char *to_string(Status s) noexcept {
    switch (s) {
    case Status::Pass:
        return "pass";
    case Status::Fail:
        return "fail";
    case Status::Missing:
        return "missing";
    }
    return "missing";
}

DashboardEntry evaluate_target(std::string tier, std::string scope, std::string metric,
                               std::span<const double> values, Statistic statistic,
                               const std::string &comparator, double target, int resamples,
                               std::uint64_t seed) {
    if (comparator != "<=" && comparator != ">=") {
        throw DomainError("comparator must be <= or >=");
    }
    DashboardEntry e{std::move(tier), std::move(scope), std::move(metric), comparator, target,
                     std::nullopt, Status::Missing};
    if (values.empty()) {
        return e;
    }
    if (values.size() == 1) {
        e.estimate = BootstrapCI{values[0], values[0], values[0], 0.95, 0};
    } else {
        e.estimate = bootstrap_ci(values, statistic, resamples, 0.95, seed);
    }
    const double v = e.estimate->value;
    const bool ok = comparator == "<=" ? v <= target : v >= target;
    e.status = ok ? Status::Pass : Status::Fail;
    return e;
}

std::vector<DashboardEntry> dashboard(std::span<const MetricRow> tier1,
                                      std::span<const MetricRow> tier2,
                                      const DashboardSpec &spec) {
    auto collect = [](std::span<const MetricRow> rows, const std::string &name,
                      const std::string &policy, const std::string &metric) {
        std::vector<double> v;
        for (const auto &r : rows) {
            if ((name.empty() || r.name == name) && (policy.empty() || r.policy == policy) &&
                r.metric == metric) {
                v.push_back(r.value);
            }
        }
        return v;
    };
    const auto &t = spec.targets;
    std::vector<DashboardEntry> out;
    out.push_back(evaluate_target(
        "tier1", spec.reference_workload, "contraction",
        collect(tier1, spec.reference_workload, spec.reference_policy, "contraction"),
        Statistic::Mean, "<=", t.contraction_max, spec.resamples, spec.seed));
    out.push_back(evaluate_target("tier2", "all", "phasepad_overhead",
                                  collect(tier2, "", "", "phasepad_overhead"), Statistic::Median,
                                  "<=", t.overhead_max, spec.resamples, spec.seed));
    struct Slo {
        const char *metric;
        const char *cmp;
        double target;
    };
    const std::array<Slo, 5> slos = {{{"jitter_ms", "<=", t.jitter_max_ms},
                                      {"ttfr_ms", "<=", t.ttfr_max_ms},
                                      {"success_fraction", ">=", t.success_min},
                                      {"timeout_fraction", "<=", t.timeout_max},
                                      {"error_fraction", "<=", t.error_max}}};
    for (const auto &scenario : spec.scenarios) {
        for (const auto &slo : slos) {
            out.push_back(evaluate_target("tier2", scenario, slo.metric,
                                          collect(tier2, scenario, "", slo.metric),
                                          Statistic::Median, slo.cmp, slo.target, spec.resamples,
                                          spec.seed));
        }
    }
    return out;
}

bool all_pass(std::span<const DashboardEntry> entries) {
    return std::all_of(entries.begin(), entries.end(),
                       [](const DashboardEntry &e) { return e.status == Status::Pass; });
}

std::string dashboard_json(std::span<const DashboardEntry> entries) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto &e : entries) {
        nlohmann::ordered_json j;
        j["tier"] = e.tier;
        j["scope"] = e.scope;
        j["metric"] = e.metric;
        j["comparator"] = e.comparator;
        j["target"] = e.target;
        if (e.estimate) {
            j["value"] = e.estimate->value;
            j["ci_lower"] = e.estimate->lower;
            j["ci_upper"] = e.estimate->upper;
        } else {
            j["value"] = nullptr;
            j["ci_lower"] = nullptr;
            j["ci_upper"] = nullptr;
        }
        // Closed pass/fail vocabulary; a missing metric is a fail flagged as missing.
        j["decision"] = e.status == Status::Pass ? "pass" : "fail";
        j["missing"] = e.status == Status::Missing;
        list.push_back(std::move(j));
    }
    nlohmann::ordered_json root;
    root["overall"] = all_pass(entries) ? "pass" : "fail";
    root["entries"] = std::move(list);
    return root.dump(2) + "\n";
}

void emit(std::vector<MetricRow> tier1, std::vector<MetricRow> tier2,
          std::span<const DashboardEntry> entries, const std::filesystem::path &dir) {
    normalise(tier1);
    normalise(tier2);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "tier1_metrics.csv", to_csv(tier1));
    write_text(dir / "tier2_metrics.csv", to_csv(tier2));
    write_text(dir / "dashboard.json", dashboard_json(entries));
}

} // namespace maestrocut::report
