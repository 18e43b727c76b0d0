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

#include "maestrocut/drifttrack.hpp"

#include "maestrocut/errors.hpp"
#include "maestrocut/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maestrocut::drift {

CusumStep cusum_update(double s, double x, const CusumConfig &cfg) noexcept {
    const double next = std::max(0.0, s + x - cfg.kappa);
    if (next > 0.0 && next >= cfg.h) {
        return {0.0, true};
    }
    return {next, false};
}

CusumBank::CusumBank(std::vector<CusumConfig> configs)
    : configs_(std::move(configs)), s_(configs_.size(), 0.0) {
    for (const auto &c : configs_) {
        if (!(c.h > 0.0)) {
            throw ConfigurationError("CUSUM threshold must be positive");
        }
    }
}

int CusumBank::update(std::span<const double> xs) {
    if (xs.size() != configs_.size()) {
        throw DomainError("CUSUM bank expects one delta per metric");
    }
    for (std::size_t m = 0; m < configs_.size(); ++m) {
        const auto step = cusum_update(s_[m], xs[m], configs_[m]);
        s_[m] = step.s;
        if (step.triggered) {
            return static_cast<int>(m);
        }
    }
    return -1;
}

void CusumBank::reset() noexcept { std::fill(s_.begin(), s_.end(), 0.0); }

double mean_run_length(double kappa, double h, const NullSampler &sampler, std::uint64_t seed,
                       int runs, int max_steps) {
    if (runs <= 0 || max_steps <= 0) {
        throw DomainError("run count and step cap must be positive");
    }
    const CusumConfig cfg{kappa, h};
    const Rng root = master_stream(seed).child("cusum_arl");
    double total = 0.0;
    for (int r = 0; r < runs; ++r) {
        Rng rng = root.child(static_cast<std::uint64_t>(r));
        double s = 0.0;
        int t = 1;
        for (; t <= max_steps; ++t) {
            const auto step = cusum_update(s, sampler(rng), cfg);
            s = step.s;
            if (step.triggered) {
                break;
            }
        }
        total += static_cast<double>(std::min(t, max_steps));
    }
    return total / static_cast<double>(runs);
}

ThresholdCalibration calibrate_cusum_threshold(double kappa, double target_arl0,
                                               const NullSampler &sampler, std::uint64_t seed,
                                               int runs) {
    if (!(target_arl0 >= 10.0)) {
        throw DomainError("target ARL0 must be at least 10");
    }
    constexpr double kLow = 0.01;
    constexpr double kHigh = 100.0;
    constexpr double kTolerance = 0.05;
    constexpr int kMaxIterations = 60;
    const int cap = static_cast<int>(std::ceil(20.0 * target_arl0));

    auto arl = [&](double h) { return mean_run_length(kappa, h, sampler, seed, runs, cap); };

    double lo = kLow;
    const double arl_lo = arl(lo);
    if (arl_lo > target_arl0 * (1.0 + kTolerance)) {
        throw CalibrationError("target ARL0 below the reachable minimum " +
                               std::to_string(arl_lo));
    }
    // Grow the bracket geometrically; long runs near the top of the range are
    // expensive, so the upper end is only evaluated when needed.
    double hi = 1.0;
    double arl_hi = arl(hi);
    while (arl_hi < target_arl0 * (1.0 - kTolerance)) {
        if (hi >= kHigh) {
            throw CalibrationError("target ARL0 above the reachable maximum " +
                                   std::to_string(arl_hi));
        }
        lo = hi;
        hi = std::min(kHigh, 2.0 * hi);
        arl_hi = arl(hi);
    }
    if (std::abs(arl_hi - target_arl0) <= kTolerance * target_arl0) {
        return {hi, arl_hi, 0};
    }

    ThresholdCalibration result;
    for (int it = 1; it <= kMaxIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double value = arl(mid);
        result = {mid, value, it};
        if (std::abs(value - target_arl0) <= kTolerance * target_arl0) {
            return result;
        }
        if (value < target_arl0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return result;
}

double kalman_gain(double p, const KalmanConfig &cfg) {
    const double prior = p + cfg.q;
    if (std::isinf(cfg.r)) {
        return 0.0;
    }
    const double denom = prior + cfg.r;
    if (denom == 0.0) {
        if (cfg.r == 0.0) {
            return 1.0;
        }
        throw DegenerateGainError("Kalman innovation variance is zero");
    }
    if (!(denom > 0.0)) {
        throw DegenerateGainError("Kalman innovation variance is not positive");
    }
    return prior / denom;
}

KalmanState kalman_step(const KalmanState &state, double z, const KalmanConfig &cfg) {
    if (!std::isfinite(z)) {
        throw DomainError("Kalman observation must be finite");
    }
    if (cfg.q < 0.0 || cfg.r < 0.0) {
        throw DomainError("Kalman noise variances must be nonnegative");
    }
    const double prior = state.p + cfg.q;
    const double k = kalman_gain(state.p, cfg);
    KalmanState next;
    next.mean = std::max(0.0, state.mean + k * (z - state.mean));
    next.p = (1.0 - k) * prior;
    return next;
}

double calibrate_process_noise(std::span<const double> warmup) {
    if (warmup.size() < 3) {
        throw DomainError("process-noise calibration needs at least three observations");
    }
    std::vector<double> diffs;
    diffs.reserve(warmup.size() - 1);
    for (std::size_t i = 1; i < warmup.size(); ++i) {
        diffs.push_back(warmup[i] - warmup[i - 1]);
    }
    return stats::sample_variance(diffs);
}

} // namespace maestrocut::drift
