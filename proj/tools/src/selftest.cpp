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
#include "maestrocut_tools/oracles.hpp"

#include <maestrocut/aead.hpp>
#include <maestrocut/allocator.hpp>
#include <maestrocut/cascade.hpp>
#include <maestrocut/errors.hpp>
#include <maestrocut/phasepad.hpp>

#include <cmath>
#include <functional>
#include <ostream>

namespace maestrocut::cli {

namespace {

// A reduced version of the acceptance batteries; fast enough to run on every install.

bool check_waterfill(Rng rng) {
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + rng.uniform_int(16);
        std::vector<double> u(n);
        for (auto &x : u) {
            x = std::exp(rng.normal(0.0, 1.5));
        }
        const double s_min = 1.0 + 20.0 * rng.uniform();
        const double total = s_min * static_cast<double>(n) * (1.0 + 20.0 * rng.uniform());
        const auto got = alloc::waterfill(u, total, s_min);
        const auto ref = oracle::dual_bisection_allocation(u, total, s_min);
        const double a = alloc::relaxed_objective(u, std::span<const double>(got));
        const double b = alloc::relaxed_objective(u, std::span<const double>(ref));
        if (std::abs(a - b) > 1e-6 * b) {
            return false;
        }
    }
    return true;
}

bool check_integer_projection(Rng rng) {
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = 1 + rng.uniform_int(4);
        std::vector<double> u(n);
        for (auto &x : u) {
            x = 0.05 + 3.0 * rng.uniform();
        }
        const alloc::Shots s_min = 1 + static_cast<alloc::Shots>(rng.uniform_int(4));
        const alloc::Shots total =
            s_min * static_cast<alloc::Shots>(n) + static_cast<alloc::Shots>(rng.uniform_int(25));
        const auto cont = alloc::waterfill(u, static_cast<double>(total), static_cast<double>(s_min));
        const auto plan = alloc::integer_project(cont, total, u, s_min);
        const double got = alloc::relaxed_objective(u, std::span<const alloc::Shots>(plan.shots));
        const double best = oracle::exhaustive_integer_optimum(u, total, s_min);
        if (std::abs(got - best) > 1e-12 * best) {
            return false;
        }
    }
    return true;
}

bool check_spectral_bound(Rng rng) {
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(12));
        const auto sigma = oracle::random_psd(n, rng);
        std::vector<double> u(static_cast<std::size_t>(n));
        std::vector<double> s(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            u[static_cast<std::size_t>(i)] = rng.uniform();
            s[static_cast<std::size_t>(i)] = 1.0 + 100.0 * rng.uniform();
        }
        const double v = alloc::variance_bound(u, s, sigma);
        if (alloc::spectral_bound(u, s, sigma) < v * (1.0 - 1e-12)) {
            return false;
        }
    }
    return true;
}

bool check_aead() {
    std::vector<aead::Byte> key(aead::kKeySize, 0);
    std::vector<aead::Byte> nonce(aead::kNonceSize, 0);
    key[0] = 1;
    nonce[0] = 3;
    const auto tag = aead::seal(key, nonce, {});
    static constexpr aead::Byte kExpected[16] = {0x07, 0xf5, 0xf4, 0x16, 0x9b, 0xbf, 0x55, 0xa8,
                                                 0x40, 0x0c, 0xd4, 0x7e, 0xa6, 0xfd, 0x40, 0x0f};
    return std::equal(tag.begin(), tag.end(), std::begin(kExpected), std::end(kExpected));
}

bool check_phasepad(Rng rng) {
    std::vector<aead::Byte> key(aead::kKeySize);
    for (auto &b : key) {
        b = static_cast<aead::Byte>(rng.uniform_int(256));
    }
    phasepad::NonceSource nonces(rng);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<aead::Byte> header(rng.uniform_int(phasepad::kHeaderCap + 1));
        for (auto &b : header) {
            b = static_cast<aead::Byte>(rng.uniform_int(256));
        }
        auto sealed = phasepad::seal_header(header, key, nonces.next());
        if (phasepad::open_header(sealed, key) != header) {
            return false;
        }
        const auto bit = rng.uniform_int(sealed.size() * 8);
        sealed[bit / 8] = static_cast<aead::Byte>(sealed[bit / 8] ^ (1U << (bit % 8)));
        try {
            (void)phasepad::open_header(sealed, key);
            return false;
        } catch (const AuthenticationError &) {
        }
    }
    return true;
}

bool check_cascade() {
    const cascade::CascadeFit fit;
    for (double h = 0.0; h <= 4.0; h += 0.5) {
        for (int s = 10; s <= 10000; s += 10) {
            const auto m = cascade::predict_mse(fit, s, h);
            const auto want = m.mle <= m.shadows ? cascade::Estimator::MLE
                                                 : cascade::Estimator::Shadows;
            if (cascade::choose_estimator(fit, s, h) != want) {
                return false;
            }
        }
    }
    const auto cross = cascade::crossover_shots(fit, 0.0);
    return cross && *cross == static_cast<std::int64_t>(std::ceil(fit.beta / fit.alpha));
}

bool check_decoy_bound(Rng rng) {
    const double bound = phasepad::detection_lower_bound(100, 2, 10);
    const double mc = oracle::simulate_detection(100, 2, 10, 20000, rng);
    const double se = std::sqrt(mc * (1.0 - mc) / 20000.0);
    return mc >= bound - 3.0 * se;
}

} // namespace

bool selftest(std::ostream &log) {
    const Rng root = master_stream(20260101);
    const std::vector<std::pair<const char *, std::function<bool()>>> checks = {
        {"waterfill matches dual bisection", [&] { return check_waterfill(root.child("wf")); }},
        {"integer projection is exact",
         [&] { return check_integer_projection(root.child("ip")); }},
        {"spectral bound dominates", [&] { return check_spectral_bound(root.child("sb")); }},
        {"AES-256-GCM-SIV known answer", [] { return check_aead(); }},
        {"envelope round trip and tamper rejection",
         [&] { return check_phasepad(root.child("pp")); }},
        {"cascade choice agrees with predicted error", [] { return check_cascade(); }},
        {"decoy detection meets its bound", [&] { return check_decoy_bound(root.child("dc")); }},
    };
    bool ok = true;
    for (const auto &[name, check] : checks) {
        bool pass = false;
        try {
            pass = check();
        } catch (const std::exception &e) {
            log << "  (" << e.what() << ")\n";
        }
        log << (pass ? "PASS " : "FAIL ") << name << '\n';
        ok = ok && pass;
    }
    return ok;
}

} // namespace maestrocut::cli
