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
#include <maestrocut/report.hpp>
#include <maestrocut/rng.hpp>

#include <cstdlib>
#include <fstream>

namespace maestrocut::cli {

namespace {

Json workload_defaults(std::size_t fragments, const char *profile, double spread,
                       std::size_t hot) {
    return Json{{"fragments", fragments},   {"profile", profile},
                {"spread", spread},         {"hot", hot},
                {"base_variance", 1.0},     {"process_noise", 1e-4},
                {"drift_factor", 3.0},      {"drift_fraction", 0.25},
                {"layers", 6},              {"qubits_per_fragment", 3},
                {"block_qubit_cap", 4}};
}

Json scenario_json(const tier2::ScenarioConfig &s) {
    return Json{{"arrival_rate", s.arrival_rate},
                {"bursty", s.bursty},
                {"burst_multiplier", s.burst_multiplier},
                {"burst_on_s", s.burst_on_s},
                {"burst_off_s", s.burst_off_s},
                {"servers", s.servers},
                {"fragments_per_job", s.fragments_per_job},
                {"service_mean_ms", s.service_mean_ms},
                {"service_cv", s.service_cv},
                {"result_latency_ms", s.result_latency_ms},
                {"retry_probability", s.retry_probability},
                {"error_rate", s.error_rate},
                {"injection_rate", s.injection_rate},
                {"injection_size", s.injection_size},
                {"timeout_ms", s.timeout_ms},
                {"duration_s", s.duration_s}};
}

const char *type_name(const Json &j) { return j.type_name(); }

bool compatible(const Json &target, const Json &value) {
    if (target.is_number_float()) {
        return value.is_number();
    }
    if (target.is_number_unsigned()) {
        return value.is_number_unsigned() ||
               (value.is_number_integer() && value.get<std::int64_t>() >= 0);
    }
    if (target.is_number_integer()) {
        return value.is_number_integer();
    }
    return target.type() == value.type();
}

const Json &at(const Json &tree, const std::string &dotted) {
    const Json *node = &tree;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot - start);
        if (!node->contains(key)) {
            throw ConfigurationError("missing config key '" + dotted + "'");
        }
        node = &(*node)[key];
        if (dot == std::string::npos) {
            return *node;
        }
        start = dot + 1;
    }
}

template <typename T> T get(const Json &tree, const std::string &dotted) {
    try {
        return at(tree, dotted).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigurationError("config key '" + dotted + "': " + e.what());
    }
}

} // namespace

Json default_config() {
    const report::Targets t;
    Json scenarios = Json::object();
    for (const auto &s : tier2::default_scenarios()) {
        scenarios[s.name] = scenario_json(s);
    }
    const tier1::EpisodeConfig e;
    return Json{
        {"seed", 1},
        {"run_id", ""},
        {"out", "out"},
        {"jobs", 1},
        {"tier1",
         {{"seeds", 20},
          {"policy", "all"},
          {"steps", e.steps},
          {"shots_per_step", e.shots_per_step},
          {"cadence", e.cadence},
          {"s_min", e.s_min},
          {"rho", e.rho},
          {"warmup", e.warmup},
          {"refine_passes", e.refine_passes},
          {"reference_workload", "QAOA-MaxCut"},
          {"kernel", {{"sigma_k2", e.kernel.sigma_k2}, {"ell", e.kernel.ell}}},
          {"cusum",
           {{"kappa", e.cusum_kappa}, {"arl_per_fragment", e.arl_per_fragment}, {"h", e.cusum_h}}},
          {"cascade",
           {{"enabled", e.cascade_enabled},
            {"alpha", e.fit.alpha},
            {"beta", e.fit.beta},
            {"b0", e.fit.bias.b0},
            {"h_thr", e.fit.bias.h_thr},
            {"pilot_fraction", e.pilot_fraction}}},
          {"objective_weights",
           {{"alpha", e.weights.alpha}, {"beta", e.weights.beta}, {"gamma", e.weights.gamma}}},
          {"workloads",
           {{"QAOA-MaxCut", workload_defaults(16, "hotspot", 16.0, 4)},
            {"UCCSD-LiH", workload_defaults(12, "geometric", 4.0, 0)},
            {"TFIM", workload_defaults(10, "geometric", 4.0, 0)},
            {"RandomCliffordT", workload_defaults(12, "geometric", 4.0, 0)},
            {"PhaseEstimation", workload_defaults(8, "geometric", 4.0, 0)}}}}},
        {"tier2",
         {{"episodes", 30},
          {"scenario", "all"},
          {"overhead", 0.01},
          {"sweep_levels", {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}},
          {"sweep_episodes", 10},
          {"scenarios", scenarios}}},
        {"phasepad",
         {{"enabled", e.phasepad_enabled},
          {"lambda", e.security.lambda},
          {"eta", e.security.eta},
          {"eps_ver", e.security.eps_ver}}},
        {"report",
         {{"resamples", report::kDefaultResamples},
          {"targets",
           {{"contraction_max", t.contraction_max},
            {"overhead_max", t.overhead_max},
            {"jitter_max_ms", t.jitter_max_ms},
            {"ttfr_max_ms", t.ttfr_max_ms},
            {"success_min", t.success_min},
            {"timeout_max", t.timeout_max},
            {"error_max", t.error_max}}}}}};
}

void merge_strict(Json &base, const Json &patch, const std::string &path) {
    if (!patch.is_object()) {
        throw ConfigurationError("config " + (path.empty() ? std::string("root") : path) +
                                 " must be an object");
    }
    for (const auto &[key, value] : patch.items()) {
        const std::string full = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) {
            throw ConfigurationError("unknown config key '" + full + "'");
        }
        Json &target = base[key];
        if (target.is_object()) {
            merge_strict(target, value, full);
        } else if (!compatible(target, value)) {
            throw ConfigurationError("config key '" + full + "' expects " + type_name(target) +
                                     ", got " + type_name(value));
        } else if (target.is_number_float()) {
            target = value.get<double>();
        } else {
            target = value;
        }
    }
}

RunConfig resolve_config(const std::optional<std::filesystem::path> &file,
                         const FlagOverrides &flags) {
    Json tree = default_config();
    bool out_from_file = false;
    if (file) {
        const std::string text = report::read_text(*file);
        Json patch;
        try {
            patch = Json::parse(text);
        } catch (const nlohmann::json::parse_error &e) {
            throw ParseError("cannot parse " + file->string() + ": " + e.what());
        }
        out_from_file = patch.is_object() && patch.contains("out");
        merge_strict(tree, patch);
    }
    if (!out_from_file) {
        if (const char *env = std::getenv("MAESTROCUT_OUT"); env != nullptr && *env != '\0') {
            tree["out"] = env;
        }
    }
    if (flags.seed) {
        tree["seed"] = *flags.seed;
    }
    if (flags.seeds) {
        tree["tier1"]["seeds"] = *flags.seeds;
    }
    if (flags.out) {
        tree["out"] = *flags.out;
    }
    if (flags.scenario) {
        tree["tier2"]["scenario"] = *flags.scenario;
    }
    if (flags.policy) {
        tree["tier1"]["policy"] = *flags.policy;
    }
    if (flags.overhead) {
        tree["tier2"]["overhead"] = *flags.overhead;
    }
    if (flags.jobs) {
        tree["jobs"] = *flags.jobs;
    }
    if (flags.run_id) {
        tree["run_id"] = *flags.run_id;
    }

    RunConfig cfg;
    cfg.seed = get<std::uint64_t>(tree, "seed");
    cfg.run_id = get<std::string>(tree, "run_id");
    if (cfg.run_id.empty()) {
        cfg.run_id = "seed-" + std::to_string(cfg.seed);
        tree["run_id"] = cfg.run_id;
    }
    cfg.jobs = get<int>(tree, "jobs");
    if (cfg.jobs < 1) {
        throw ConfigurationError("config key 'jobs' must be at least 1");
    }
    if (get<int>(tree, "tier1.seeds") < 1) {
        throw ConfigurationError("config key 'tier1.seeds' must be at least 1");
    }
    if (get<int>(tree, "tier2.episodes") < 1) {
        throw ConfigurationError("config key 'tier2.episodes' must be at least 1");
    }
    cfg.out_dir = std::filesystem::path(get<std::string>(tree, "out")) / cfg.run_id;
    cfg.tree = std::move(tree);

    // Validate the typed views eagerly so bad values fail before any work starts.
    for (const auto &name : tier1_workloads(cfg)) {
        (void)workload_params(cfg, name);
    }
    (void)tier1_policies(cfg);
    (void)episode_config(cfg).fit;
    for (const auto &s : tier2_scenarios(cfg)) {
        s.validate();
    }
    return cfg;
}

std::vector<std::string> tier1_workloads(const RunConfig &cfg) {
    std::vector<std::string> out;
    for (const auto &name : tier1::workload_names()) {
        if (at(cfg.tree, "tier1.workloads").contains(name)) {
            out.push_back(name);
        }
    }
    return out;
}

tier1::WorkloadParams workload_params(const RunConfig &cfg, const std::string &name) {
    const std::string p = "tier1.workloads." + name + ".";
    const Json &w = at(cfg.tree, "tier1.workloads." + name);
    (void)w;
    tier1::WorkloadParams wp;
    wp.fragments = get<std::size_t>(cfg.tree, p + "fragments");
    wp.profile = tier1::parse_profile(get<std::string>(cfg.tree, p + "profile"));
    wp.spread = get<double>(cfg.tree, p + "spread");
    wp.hot = get<std::size_t>(cfg.tree, p + "hot");
    wp.base_variance = get<double>(cfg.tree, p + "base_variance");
    wp.process_noise = get<double>(cfg.tree, p + "process_noise");
    wp.drift_factor = get<double>(cfg.tree, p + "drift_factor");
    wp.drift_fraction = get<double>(cfg.tree, p + "drift_fraction");
    wp.layers = get<int>(cfg.tree, p + "layers");
    wp.qubits_per_fragment = get<int>(cfg.tree, p + "qubits_per_fragment");
    wp.block_qubit_cap = get<int>(cfg.tree, p + "block_qubit_cap");
    wp.steps = get<int>(cfg.tree, "tier1.steps");
    return wp;
}

tier1::EpisodeConfig episode_config(const RunConfig &cfg) {
    const Json &t = cfg.tree;
    tier1::EpisodeConfig e;
    e.steps = get<int>(t, "tier1.steps");
    e.shots_per_step = get<std::int64_t>(t, "tier1.shots_per_step");
    e.cadence = get<std::int64_t>(t, "tier1.cadence");
    e.s_min = get<std::int64_t>(t, "tier1.s_min");
    e.rho = get<double>(t, "tier1.rho");
    e.warmup = get<int>(t, "tier1.warmup");
    e.refine_passes = get<int>(t, "tier1.refine_passes");
    e.kernel = {get<double>(t, "tier1.kernel.sigma_k2"), get<double>(t, "tier1.kernel.ell")};
    e.cusum_kappa = get<double>(t, "tier1.cusum.kappa");
    e.arl_per_fragment = get<double>(t, "tier1.cusum.arl_per_fragment");
    e.cusum_h = get<double>(t, "tier1.cusum.h");
    e.cascade_enabled = get<bool>(t, "tier1.cascade.enabled");
    e.fit = {get<double>(t, "tier1.cascade.alpha"),
             get<double>(t, "tier1.cascade.beta"),
             {get<double>(t, "tier1.cascade.b0"), get<double>(t, "tier1.cascade.h_thr")}};
    e.pilot_fraction = get<double>(t, "tier1.cascade.pilot_fraction");
    e.weights = {get<double>(t, "tier1.objective_weights.alpha"),
                 get<double>(t, "tier1.objective_weights.beta"),
                 get<double>(t, "tier1.objective_weights.gamma")};
    e.phasepad_enabled = get<bool>(t, "phasepad.enabled");
    e.security = {get<int>(t, "phasepad.lambda"), get<double>(t, "phasepad.eta"),
                  get<double>(t, "phasepad.eps_ver")};
    e.fit.validate();
    e.weights.validate();
    e.security.validate();
    return e;
}

std::vector<tier1::Policy> tier1_policies(const RunConfig &cfg) {
    const auto p = get<std::string>(cfg.tree, "tier1.policy");
    if (p == "all") {
        return tier1::all_policies();
    }
    return {tier1::parse_policy(p)};
}

std::vector<tier2::ScenarioConfig> tier2_scenarios(const RunConfig &cfg) {
    const auto only = get<std::string>(cfg.tree, "tier2.scenario");
    std::vector<tier2::ScenarioConfig> out;
    bool matched = false;
    for (const auto &[name, s] : at(cfg.tree, "tier2.scenarios").items()) {
        if (only != "all" && only != name) {
            continue;
        }
        matched = true;
        const std::string p = "tier2.scenarios." + name + ".";
        tier2::ScenarioConfig sc;
        sc.name = name;
        sc.arrival_rate = get<double>(cfg.tree, p + "arrival_rate");
        sc.bursty = get<bool>(cfg.tree, p + "bursty");
        sc.burst_multiplier = get<double>(cfg.tree, p + "burst_multiplier");
        sc.burst_on_s = get<double>(cfg.tree, p + "burst_on_s");
        sc.burst_off_s = get<double>(cfg.tree, p + "burst_off_s");
        sc.servers = get<int>(cfg.tree, p + "servers");
        sc.fragments_per_job = get<int>(cfg.tree, p + "fragments_per_job");
        sc.service_mean_ms = get<double>(cfg.tree, p + "service_mean_ms");
        sc.service_cv = get<double>(cfg.tree, p + "service_cv");
        sc.result_latency_ms = get<double>(cfg.tree, p + "result_latency_ms");
        sc.retry_probability = get<double>(cfg.tree, p + "retry_probability");
        sc.error_rate = get<double>(cfg.tree, p + "error_rate");
        sc.injection_rate = get<double>(cfg.tree, p + "injection_rate");
        sc.injection_size = get<double>(cfg.tree, p + "injection_size");
        sc.timeout_ms = get<double>(cfg.tree, p + "timeout_ms");
        sc.duration_s = get<double>(cfg.tree, p + "duration_s");
        (void)s;
        out.push_back(std::move(sc));
    }
    if (!matched) {
        throw ConfigurationError("unknown scenario '" + only + "'");
    }
    return out;
}

report::Targets targets(const RunConfig &cfg) {
    const std::string p = "report.targets.";
    return {get<double>(cfg.tree, p + "contraction_max"),
            get<double>(cfg.tree, p + "overhead_max"),
            get<double>(cfg.tree, p + "jitter_max_ms"),
            get<double>(cfg.tree, p + "ttfr_max_ms"),
            get<double>(cfg.tree, p + "success_min"),
            get<double>(cfg.tree, p + "timeout_max"),
            get<double>(cfg.tree, p + "error_max")};
}

std::uint64_t episode_seed(std::uint64_t master, std::uint64_t index) {
    Rng r = master_stream(master).child("episode").child(index);
    return r();
}

} // namespace maestrocut::cli
