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

#include <maestrocut/errors.hpp>
#include <maestrocut/report.hpp>
#include <maestrocut_tools/cli.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

using namespace maestrocut;
using namespace maestrocut::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("maestrocut_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path &dir, const Json &patch) {
    const auto path = dir / "config.json";
    std::ofstream(path) << patch.dump(2);
    return path;
}

Json small_run(const fs::path &out) {
    Json j;
    j["out"] = out.string();
    j["tier1"]["seeds"] = 2;
    j["tier1"]["steps"] = 20;
    j["tier2"]["sweep_episodes"] = 2;
    return j;
}

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "maestrocut");
    std::vector<char *> argv;
    for (auto &a : args) {
        argv.push_back(a.data());
    }
    return main_entry(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST(Config, DefaultsMatchShippedFile) {
    const auto shipped =
        Json::parse(report::read_text(fs::path(MAESTROCUT_SOURCE_DIR) / "configs/default.json"));
    EXPECT_EQ(shipped, default_config());
}

TEST(Config, FlagsOverrideFile) {
    const auto dir = scratch("flags");
    const auto path = write_config(dir, Json{{"seed", 3}});
    EXPECT_EQ(resolve_config(path, {}).seed, 3U);
    FlagOverrides flags;
    flags.seed = 7;
    const auto cfg = resolve_config(path, flags);
    EXPECT_EQ(cfg.seed, 7U);
    EXPECT_EQ(cfg.run_id, "seed-7");
    EXPECT_EQ(cfg.out_dir, fs::path("out") / "seed-7");
}

TEST(Config, UnknownKeyIsNamed) {
    const auto dir = scratch("unknown");
    const auto path = write_config(dir, Json{{"tier9", {{"x", 1}}}});
    try {
        (void)resolve_config(path, {});
        FAIL() << "expected ConfigurationError";
    } catch (const ConfigurationError &e) {
        EXPECT_NE(std::string(e.what()).find("tier9"), std::string::npos);
    }
    EXPECT_EQ(invoke({"tier1", "--config", path.string()}), 2);
}

TEST(Config, EnvironmentSetsOutputRootBelowFlags) {
    ::setenv("MAESTROCUT_OUT", "/tmp/envroot", 1);
    EXPECT_EQ(resolve_config(std::nullopt, {}).out_dir, fs::path("/tmp/envroot") / "seed-1");
    FlagOverrides flags;
    flags.out = "/tmp/flagroot";
    EXPECT_EQ(resolve_config(std::nullopt, flags).out_dir, fs::path("/tmp/flagroot") / "seed-1");
    ::unsetenv("MAESTROCUT_OUT");
}

TEST(Config, EpisodeSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i) {
        seen.insert(episode_seed(1, i));
    }
    EXPECT_EQ(seen.size(), 100U);
    EXPECT_EQ(episode_seed(1, 4), episode_seed(1, 4));
}

TEST(Cli, Tier1RowsCoverEveryEpisode) {
    const auto dir = scratch("tier1");
    auto patch = small_run(dir);
    const auto path = write_config(dir, patch);
    FlagOverrides flags;
    flags.seeds = 5;
    const auto cfg = resolve_config(path, flags);
    const auto out = run_tier1(cfg);
    std::set<std::tuple<std::string, std::string, std::uint64_t>> keys;
    for (const auto &r : out.rows) {
        keys.insert({r.name, r.policy, r.seed});
    }
    EXPECT_EQ(keys.size(), 5U * 5U * 3U);
}

TEST(Cli, SuiteExitCodesFollowDashboard) {
    const auto dir = scratch("suite");
    const auto path = write_config(dir, small_run(dir));
    EXPECT_EQ(invoke({"suite", "--config", path.string(), "--overhead", "0.03"}), 1);
    const auto run_dir = dir / "seed-1";
    for (const char *f : {"config_echo.json", "tier1_metrics.csv", "tier2_metrics.csv",
                          "dashboard.json", "timing.json"}) {
        EXPECT_TRUE(fs::exists(run_dir / f)) << f;
    }
    // report re-evaluates the stored CSVs and reaches the same verdict.
    EXPECT_EQ(invoke({"report", "--config", path.string()}), 1);
}

TEST(Cli, SelftestPasses) {
    EXPECT_EQ(invoke({"selftest"}), 0);
}

TEST(Cli, BadInvocationsExitTwo) {
    EXPECT_EQ(invoke({}), 2);
    EXPECT_EQ(invoke({"tier1", "--seeds", "many"}), 2);
}
