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

#include <maestrocut/aead.hpp>
#include <maestrocut/allocator.hpp>
#include <maestrocut/rng.hpp>
#include <maestrocut/tier1.hpp>

#include <benchmark/benchmark.h>

#include <array>
#include <vector>

using namespace maestrocut;

namespace {

std::vector<double> random_u(std::size_t n) {
    Rng rng(5);
    std::vector<double> u(n);
    for (auto &x : u) {
        x = 0.1 + rng.uniform() * 10.0;
    }
    return u;
}

void BM_Waterfill(benchmark::State &state) {
    const auto u = random_u(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(alloc::waterfill(u, 8000.0, 32.0));
    }
}
BENCHMARK(BM_Waterfill)->Arg(8)->Arg(16)->Arg(64);

void BM_IntegerProject(benchmark::State &state) {
    const auto u = random_u(static_cast<std::size_t>(state.range(0)));
    const auto cont = alloc::waterfill(u, 8000.0, 32.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(alloc::integer_project(cont, 8000, u, 32));
    }
}
BENCHMARK(BM_IntegerProject)->Arg(8)->Arg(16)->Arg(64);

void BM_Seal(benchmark::State &state) {
    const std::array<aead::Byte, aead::kKeySize> key{};
    const std::array<aead::Byte, aead::kNonceSize> nonce{};
    const std::vector<std::uint8_t> pt(static_cast<std::size_t>(state.range(0)), 0x5a);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aead::seal(key, nonce, pt));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Seal)->Arg(256)->Arg(4096);

void BM_Polyval(benchmark::State &state) {
    const aead::Block h{0x25, 0x62, 0x93, 0x47};
    const std::vector<aead::Byte> data(static_cast<std::size_t>(state.range(0)), 0x11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(state.range(1) != 0 ? aead::polyval(h, data)
                                                     : aead::polyval_portable(h, data));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Polyval)->Args({4096, 1})->Args({4096, 0});

void BM_Episode(benchmark::State &state) {
    const auto spec = tier1::synth_workload("QAOA-MaxCut", 1);
    tier1::EpisodeConfig cfg;
    cfg.seed = 1;
    cfg.steps = 20;
    cfg.cusum_h = 8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tier1::run_episode(spec, cfg));
    }
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
