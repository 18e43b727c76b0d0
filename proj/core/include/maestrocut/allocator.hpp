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

#include "maestrocut/drifttrack.hpp"
#include "maestrocut/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace maestrocut::alloc {

using Shots = std::int64_t;

struct KernelParams {
    double sigma_k2 = 1.0; ///< kernel variance
    double ell = 1.0;      ///< length scale, hops
};

/// Topology covariance Sigma and its shrunk form Sigma + diag(P).
struct CovarianceModel {
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd sigma_tilde;
};

struct TailParams {
    double rho = 0.05; ///< confidence complement
    double n_obs = 1;  ///< N in log(N / rho)

    /// N taken as the number of fragments in the batch.
    static TailParams for_batch(double rho, std::size_t fragments) {
        return {rho, static_cast<double>(fragments)};
    }
};

/// Integer shot vector. Invariant: sum(shots) == total, every entry >= s_min.
struct ShotPlan {
    std::vector<Shots> shots;
    Shots total = 0;
    Shots s_min = 0;

    bool operator==(const ShotPlan &) const = default;
};

/// Matern-1/2 kernel sigma_k2 * exp(-d / ell).
[[nodiscard]] double kernel(double hops, const KernelParams &params);

[[nodiscard]] CovarianceModel build_covariance(const Topology &topology,
                                               std::span<const NodeId> anchors,
                                               const KernelParams &params,
                                               std::span<const double> kalman_p);

/// sigma_hat * sqrt(ln(N / rho)).
[[nodiscard]] double tail_factor(double sigma_hat, const TailParams &tail);

/// u^T D(s)^-1 Sigma_tilde D(s)^-1 u.
[[nodiscard]] double variance_bound(std::span<const double> u, std::span<const double> shots,
                                    const Eigen::MatrixXd &sigma_tilde);

/// Largest eigenvalue of a symmetric matrix. Symmetric eigendecomposition with
/// a power-iteration fallback; throws NumericError if neither converges.
[[nodiscard]] double lambda_max(const Eigen::MatrixXd &symmetric);

/// lambda_max(Sigma_tilde) * sum_i u_i^2 / s_i^2; never below variance_bound.
[[nodiscard]] double spectral_bound(std::span<const double> u, std::span<const double> shots,
                                    const Eigen::MatrixXd &sigma_tilde);

/// sum_i u_i^2 / s_i^2, with zero-u terms contributing 0.
[[nodiscard]] double relaxed_objective(std::span<const double> u, std::span<const double> shots);
[[nodiscard]] double relaxed_objective(std::span<const double> u, std::span<const Shots> shots);

/**
 * Continuous minimiser of sum u_i^2 / s_i^2 subject to sum s_i = S and
 * s_i >= s_min: s_i proportional to u_i^(2/3), with entries that fall below
 * the floor pinned at s_min and the remainder re-solved until no new floor
 * binds.
 */
[[nodiscard]] std::vector<double> waterfill(std::span<const double> u, double total,
                                            double s_min);

/**
 * Rounds a continuous allocation to integers summing to `total`. Entries are
 * rounded to nearest; the surplus or deficit is cleared one shot at a time on
 * the entry with the largest objective decrease (increments) or smallest
 * increase (decrements, never below s_min); single-shot transfers between
 * entries are then applied while they lower the objective, which makes the
 * result an exact integer optimum. Ties go to the lowest index.
 */
[[nodiscard]] ShotPlan integer_project(std::span<const double> continuous, Shots total,
                                       std::span<const double> u, Shots s_min);

/// Equal split; the remainder goes to the lowest indices.
[[nodiscard]] ShotPlan uniform_plan(std::size_t fragments, Shots total, Shots s_min);

/// Shots proportional to u (floors pinned), largest-remainder rounding.
[[nodiscard]] ShotPlan proportional_plan(std::span<const double> u, Shots total, Shots s_min);

struct Allocation {
    ShotPlan plan;
    std::vector<double> u;
    std::vector<double> continuous;
    CovarianceModel covariance;
    double bound = 0.0; ///< variance_bound of the integer plan
};

/// Full path: tail factors from the Kalman means, covariance with shrinkage,
/// water-filling, then integer projection.
[[nodiscard]] Allocation allocate(std::span<const drift::KalmanState> states,
                                  const Topology &topology, std::span<const NodeId> anchors,
                                  const KernelParams &params, double rho, Shots total,
                                  Shots s_min);

/// Counts reallocation events: one each time the executed shot count crosses a multiple of B.
class CadenceTracker {
  public:
    explicit CadenceTracker(Shots cadence = 500);
    /// Returns how many reallocation events the new shots trigger.
    int record(Shots executed);
    [[nodiscard]] Shots executed() const noexcept { return executed_; }
    [[nodiscard]] int events() const noexcept { return events_; }
    [[nodiscard]] Shots cadence() const noexcept { return cadence_; }

  private:
    Shots cadence_;
    Shots executed_ = 0;
    int events_ = 0;
};

} // namespace maestrocut::alloc
