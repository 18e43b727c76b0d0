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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace maestrocut::report {

enum class Statistic { Mean, Median };

struct BootstrapCI {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    int resamples = 10000;
};

inline constexpr int kDefaultResamples = 10000;

/// Percentile bootstrap. Throws DomainError for fewer than two samples.
[[nodiscard]] BootstrapCI bootstrap_ci(std::span<const double> samples, Statistic statistic,
                                       int resamples = kDefaultResamples, double level = 0.95,
                                       std::uint64_t seed = 0);

struct MetricRow {
    std::string tier; ///< "tier1" or "tier2"
    std::string name; ///< workload or scenario
    std::string policy;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
    std::string units;

    bool operator==(const MetricRow &) const = default;
};

inline constexpr const char *kCsvHeader = "tier,name,policy,seed,metric,value,units";

/// Sorts rows by (tier, name, policy, seed, metric) and throws DomainError on a duplicate key.
void normalise(std::vector<MetricRow> &rows);

/// Values are printed with "%.17g", so a write/read round trip is exact.
[[nodiscard]] std::string to_csv(std::span<const MetricRow> rows);
[[nodiscard]] std::vector<MetricRow> parse_csv(const std::string &text);

void write_text(const std::filesystem::path &path, const std::string &text);
[[nodiscard]] std::string read_text(const std::filesystem::path &path);

struct Targets {
    double contraction_max = 0.6;
    double overhead_max = 0.01;
    double jitter_max_ms = 150.0;
    double ttfr_max_ms = 220.0;
    double success_min = 0.97;
    double timeout_max = 0.005;
    double error_max = 0.025;
};

enum class Status { Pass, Fail, Missing };
[[nodiscard]] const char *to_string(Status s) noexcept;

struct DashboardEntry {
    std::string tier;
    std::string scope;  ///< workload or scenario
    std::string metric;
    std::string comparator; ///< "<=" or ">="
    double target = 0.0;
    std::optional<BootstrapCI> estimate;
    Status status = Status::Missing;
};

/// Inclusive comparison of a statistic against its target.
[[nodiscard]] DashboardEntry evaluate_target(std::string tier, std::string scope,
                                             std::string metric, std::span<const double> values,
                                             Statistic statistic, const std::string &comparator,
                                             double target, int resamples, std::uint64_t seed);

struct DashboardSpec {
    Targets targets;
    std::string reference_workload = "QAOA-MaxCut";
    std::string reference_policy = "TopoGP";
    std::vector<std::string> scenarios = {"Baseline", "Noisy", "Bursty", "Adversarial"};
    int resamples = kDefaultResamples;
    std::uint64_t seed = 0;
};

/**
 * Tier-1: mean contraction of the reference workload and policy. Tier-2: the
 * median of each SLO metric per scenario, and the median configured PhasePad
 * overhead across all scenarios. Entries whose rows are absent are Missing.
 */
[[nodiscard]] std::vector<DashboardEntry> dashboard(std::span<const MetricRow> tier1,
                                                    std::span<const MetricRow> tier2,
                                                    const DashboardSpec &spec);

/// Every entry passed (a Missing entry never counts as a pass).
[[nodiscard]] bool all_pass(std::span<const DashboardEntry> entries);

[[nodiscard]] std::string dashboard_json(std::span<const DashboardEntry> entries);

/// Writes tier1_metrics.csv, tier2_metrics.csv and dashboard.json into `dir`.
void emit(std::vector<MetricRow> tier1, std::vector<MetricRow> tier2,
          std::span<const DashboardEntry> entries, const std::filesystem::path &dir);

} // namespace maestrocut::report
