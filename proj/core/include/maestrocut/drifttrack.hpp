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

#include "maestrocut/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace maestrocut::drift {

// ---------------------------------------------------------------------------
// CUSUM

struct CusumConfig {
    double kappa = 0.5; ///< slack
    double h = 5.0;     ///< threshold
};

struct CusumStep {
    double s = 0.0;
    bool triggered = false;
};

/// s' = max(0, s + x - kappa); fires when s' >= h (and s' > 0), after which s' resets to 0.
[[nodiscard]] CusumStep cusum_update(double s, double x, const CusumConfig &cfg) noexcept;

/**
 * Bank of per-metric detectors, OR-combined. Metrics are scanned in order and
 * the scan stops at the first detector that fires; that detector resets and
 * the remaining detectors are left untouched for this step.
 */
class CusumBank {
  public:
    CusumBank() = default;
    explicit CusumBank(std::vector<CusumConfig> configs);

    /// Returns the index of the detector that fired, or -1.
    int update(std::span<const double> xs);
    void reset() noexcept;

    [[nodiscard]] std::size_t size() const noexcept { return configs_.size(); }
    [[nodiscard]] std::span<const double> accumulators() const noexcept { return s_; }
    [[nodiscard]] const std::vector<CusumConfig> &configs() const noexcept { return configs_; }

  private:
    std::vector<CusumConfig> configs_;
    std::vector<double> s_;
};

using NullSampler = std::function<double(Rng &)>;

/**
 * Monte-Carlo mean run length to the first alarm. Run r draws from
 * rng.child(r); runs are capped at `max_steps` (a capped run counts as
 * max_steps), so results for different h share random numbers.
 */
[[nodiscard]] double mean_run_length(double kappa, double h, const NullSampler &sampler,
                                     std::uint64_t seed, int runs, int max_steps);

struct ThresholdCalibration {
    double h = 0.0;
    double arl = 0.0; ///< Monte-Carlo ARL at h, from the calibration runs
    int iterations = 0;
};

/**
 * Searches h in [0.01, 100] for a Monte-Carlo ARL within 5% of `target_arl0`
 * under the null sampler: the upper end starts at 1 and doubles until the
 * target is bracketed, then the bracket is bisected. Throws DomainError for targets below
 * 10 and CalibrationError when the target lies outside the reachable range.
 */
[[nodiscard]] ThresholdCalibration calibrate_cusum_threshold(double kappa, double target_arl0,
                                                             const NullSampler &sampler,
                                                             std::uint64_t seed, int runs = 2000);

// ---------------------------------------------------------------------------
// Scalar Kalman filter over a latent variance

struct KalmanConfig {
    double q = 0.0; ///< process noise variance
    double r = 0.0; ///< observation noise variance
};

struct KalmanState {
    double mean = 0.0; ///< estimated latent variance
    double p = 1.0;    ///< error covariance
};

/// Predict/update with observation z. The posterior mean is clamped at 0.
/// r = +inf is accepted as a no-information observation (gain 0).
[[nodiscard]] KalmanState kalman_step(const KalmanState &state, double z,
                                      const KalmanConfig &cfg);

/// Kalman gain p^- / (p^- + r) for p^- = p + q.
[[nodiscard]] double kalman_gain(double p, const KalmanConfig &cfg);

/// Process-noise estimate: sample variance of first differences of a warmup window.
[[nodiscard]] double calibrate_process_noise(std::span<const double> warmup);

/// Number of warmup observations used to calibrate q.
inline constexpr int kProcessNoiseWarmup = 10;

} // namespace maestrocut::drift
