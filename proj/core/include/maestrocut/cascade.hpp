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
#include <optional>
#include <span>
#include <vector>

namespace maestrocut::cascade {

enum class Estimator { Shadows, MLE };

[[nodiscard]] const char *to_string(Estimator e) noexcept;

/// b(H) = b0 * max(0, H - h_thr)
struct BiasModel {
    double b0 = 0.05;
    double h_thr = 1.0; ///< bits

    [[nodiscard]] double operator()(double entropy_bits) const noexcept;
};

struct CascadeFit {
    double alpha = 1.0; ///< shadows: mse = alpha / s
    double beta = 1.0;  ///< mle: mse = beta / s^2 + b(H)^2
    BiasModel bias;

    /// Throws ConfigurationError unless alpha > 0, beta > 0, b0 >= 0.
    void validate() const;
};

struct PredictedMse {
    double shadows = 0.0;
    double mle = 0.0;
};

/// Plug-in Shannon entropy in bits. Throws DomainError on an empty histogram.
[[nodiscard]] double pilot_entropy(std::span<const std::uint64_t> counts);

/// ceil(fraction * shots), at least 1 when shots > 0.
[[nodiscard]] std::int64_t pilot_shots(std::int64_t shots, double fraction = 0.01);

/// Throws DomainError when s < 1.
[[nodiscard]] PredictedMse predict_mse(const CascadeFit &fit, double s, double entropy_bits);

/// Smallest integer s >= 1 at which the MLE model is no worse than shadows;
/// nullopt when the bias makes that impossible for every s.
[[nodiscard]] std::optional<std::int64_t> crossover_shots(const CascadeFit &fit,
                                                          double entropy_bits);

/// MLE iff predicted MLE error <= predicted shadows error.
[[nodiscard]] Estimator choose_estimator(const CascadeFit &fit, double s, double entropy_bits);

struct PilotSample {
    Estimator arm = Estimator::Shadows;
    double s = 1.0;
    double entropy_bits = 0.0;
    double squared_error = 0.0;
};

/**
 * Least-squares fit of both arms. Shadows: alpha through the origin on 1/s,
 * rejected when the log-log slope is flatter than -0.5. MLE: for each
 * candidate h_thr on a grid, nonnegative least squares for (beta, b0^2) on
 * (1/s^2, max(0, H - h_thr)^2); the lowest residual wins. Each arm needs at
 * least three distinct s values. Throws FitError otherwise.
 */
[[nodiscard]] CascadeFit fit_from_pilots(std::span<const PilotSample> samples);

} // namespace maestrocut::cascade
