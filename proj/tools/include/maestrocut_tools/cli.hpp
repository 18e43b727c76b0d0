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

#include <maestrocut/report.hpp>
#include <maestrocut/tier1.hpp>
#include <maestrocut/tier2.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace maestrocut::cli {

using Json = nlohmann::ordered_json;

/// Every tunable parameter with its default value.
[[nodiscard]] Json default_config();

struct FlagOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> seeds;
    std::optional<std::string> out;
    std::optional<std::string> scenario;
    std::optional<std::string> policy;
    std::optional<double> overhead;
    std::optional<int> jobs;
    std::optional<std::string> run_id;
};

struct RunConfig {
    Json tree; ///< fully resolved; echoed to config_echo.json
    std::uint64_t seed = 0;
    std::string run_id;
    std::filesystem::path out_dir; ///< <out>/<run_id>
    int jobs = 1;
};

/**
 * Defaults, then the file (if any), then the MAESTROCUT_OUT environment
 * variable for the output root when neither file nor flags set it, then flags.
 * Throws ConfigurationError naming the offending key for unknown keys or type
 * mismatches, and IoError/ParseError for unreadable files.
 */
[[nodiscard]] RunConfig resolve_config(const std::optional<std::filesystem::path> &file,
                                       const FlagOverrides &flags);

/// Overlays `patch` onto `base`; keys absent from `base` are rejected.
void merge_strict(Json &base, const Json &patch, const std::string &path = "");

// Typed views of the resolved tree.
[[nodiscard]] std::vector<std::string> tier1_workloads(const RunConfig &cfg);
[[nodiscard]] tier1::WorkloadParams workload_params(const RunConfig &cfg, const std::string &name);
[[nodiscard]] tier1::EpisodeConfig episode_config(const RunConfig &cfg);
[[nodiscard]] std::vector<tier1::Policy> tier1_policies(const RunConfig &cfg);
[[nodiscard]] std::vector<tier2::ScenarioConfig> tier2_scenarios(const RunConfig &cfg);
[[nodiscard]] report::Targets targets(const RunConfig &cfg);

/// Seed of episode `index`: the first output of the stream master(seed) / "episode" / index.
[[nodiscard]] std::uint64_t episode_seed(std::uint64_t master, std::uint64_t index);

struct Tier1Output {
    std::vector<report::MetricRow> rows;
    double phasepad_seconds = 0.0;
    double mask_seal_seconds = 0.0;
    double episode_seconds = 0.0;
};

[[nodiscard]] Tier1Output run_tier1(const RunConfig &cfg);
[[nodiscard]] std::vector<report::MetricRow> run_tier2(const RunConfig &cfg);

/// Subcommands: tier1, tier2, suite, selftest, report. Returns the exit status.
int run(const std::string &subcommand, const RunConfig &cfg, std::ostream &log);

/// Runs the oracle batteries; returns true when every check passes.
bool selftest(std::ostream &log);

/// Full command-line entry point (parsing, dispatch, exit codes).
int main_entry(int argc, char **argv);

} // namespace maestrocut::cli
