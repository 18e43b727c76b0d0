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

#include "maestrocut/allocator.hpp"

#include "maestrocut/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace maestrocut::alloc {

namespace {

double term(double u, double s) {
    if (u == 0.0) {
        return 0.0;
    }
    return (u * u) / (s * s);
}

void check_dims(std::span<const double> u, std::span<const double> shots,
                const Eigen::MatrixXd &m) {
    const auto n = static_cast<Eigen::Index>(u.size());
    if (shots.size() != u.size() || m.rows() != n || m.cols() != n) {
        throw DomainError("dimension mismatch between u, shots and covariance");
    }
    for (const double s : shots) {
        if (!(s > 0.0)) {
            throw DomainError("shot counts must be positive");
        }
    }
}

double power_iteration(const Eigen::MatrixXd &m) {
    constexpr int kMaxIterations = 100000;
    constexpr double kTolerance = 1e-10;
    const auto n = m.rows();
    // Shift so the dominant eigenvalue is the largest algebraic one.
    const double shift = m.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::MatrixXd shifted = m + shift * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double value = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        Eigen::VectorXd y = shifted * x;
        const double norm = y.norm();
        if (norm == 0.0) {
            return -shift;
        }
        y /= norm;
        const double next = y.dot(shifted * y);
        if (std::abs(next - value) <= kTolerance * std::max(1.0, std::abs(next))) {
            return next - shift;
        }
        value = next;
        x = y;
    }
    throw NumericError("power iteration did not converge");
}

} // namespace

double kernel(double hops, const KernelParams &params) {
    if (!(hops >= 0.0)) {
        throw DomainError("kernel distance must be nonnegative");
    }
    if (!(params.sigma_k2 > 0.0) || !(params.ell > 0.0)) {
        throw DomainError("kernel parameters must be positive");
    }
    return params.sigma_k2 * std::exp(-hops / params.ell);
}

CovarianceModel build_covariance(const Topology &topology, std::span<const NodeId> anchors,
                                 const KernelParams &params, std::span<const double> kalman_p) {
    const auto n = static_cast<Eigen::Index>(anchors.size());
    if (kalman_p.size() != anchors.size()) {
        throw DomainError("one filter covariance per fragment is required");
    }
    CovarianceModel model;
    model.sigma.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const int d = topology.distance(anchors[static_cast<std::size_t>(i)],
                                            anchors[static_cast<std::size_t>(j)]);
            const double k = kernel(static_cast<double>(d), params);
            model.sigma(i, j) = k;
            model.sigma(j, i) = k;
        }
    }
    model.sigma_tilde = model.sigma;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = kalman_p[static_cast<std::size_t>(i)];
        if (!(p >= 0.0)) {
            throw DomainError("filter covariance must be nonnegative");
        }
        model.sigma_tilde(i, i) += p;
    }
    return model;
}

double tail_factor(double sigma_hat, const TailParams &tail) {
    if (!(sigma_hat >= 0.0)) {
        throw DomainError("sigma_hat must be nonnegative");
    }
    if (!(tail.rho > 0.0)) {
        throw DomainError("rho must be positive");
    }
    const double ratio = tail.n_obs / tail.rho;
    if (!(ratio >= 1.0)) {
        throw DomainError("tail factor requires N / rho >= 1");
    }
    return sigma_hat * std::sqrt(std::log(ratio));
}

double variance_bound(std::span<const double> u, std::span<const double> shots,
                      const Eigen::MatrixXd &sigma_tilde) {
    check_dims(u, shots, sigma_tilde);
    Eigen::VectorXd y(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = u[i] / shots[i];
    }
    return y.dot(sigma_tilde * y);
}

double lambda_max(const Eigen::MatrixXd &symmetric) {
    if (symmetric.rows() == 0 || symmetric.rows() != symmetric.cols()) {
        throw DomainError("lambda_max needs a non-empty square matrix");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric,
                                                                Eigen::EigenvaluesOnly);
    if (solver.info() == Eigen::Success) {
        return solver.eigenvalues().maxCoeff();
    }
    return power_iteration(symmetric);
}

double spectral_bound(std::span<const double> u, std::span<const double> shots,
                      const Eigen::MatrixXd &sigma_tilde) {
    check_dims(u, shots, sigma_tilde);
    // Equality cases (n = 1, u along the top eigenvector) can round either way.
    return std::max(lambda_max(sigma_tilde) * relaxed_objective(u, shots),
                    variance_bound(u, shots, sigma_tilde));
}

double relaxed_objective(std::span<const double> u, std::span<const double> shots) {
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        total += term(u[i], shots[i]);
    }
    return total;
}

double relaxed_objective(std::span<const double> u, std::span<const Shots> shots) {
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        total += term(u[i], static_cast<double>(shots[i]));
    }
    return total;
}

std::vector<double> waterfill(std::span<const double> u, double total, double s_min) {
    const std::size_t n = u.size();
    if (n == 0) {
        throw DomainError("water-filling needs at least one fragment");
    }
    if (!(s_min >= 0.0)) {
        throw DomainError("shot floor must be nonnegative");
    }
    if (total < static_cast<double>(n) * s_min) {
        throw InfeasibilityError("budget " + std::to_string(total) + " is below n * s_min");
    }
    std::vector<double> weight(n);
    bool any_positive = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(u[i] >= 0.0)) {
            throw DomainError("tail factors must be nonnegative");
        }
        weight[i] = std::cbrt(u[i] * u[i]);
        any_positive = any_positive || u[i] > 0.0;
    }
    if (!any_positive) {
        throw DomainError("at least one tail factor must be positive");
    }

    std::vector<char> pinned(n, 0);
    std::vector<double> s(n, s_min);
    while (true) {
        double free_weight = 0.0;
        std::size_t pinned_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i] != 0) {
                ++pinned_count;
            } else {
                free_weight += weight[i];
            }
        }
        const double remaining = total - s_min * static_cast<double>(pinned_count);
        bool newly_pinned = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i] != 0) {
                s[i] = s_min;
                continue;
            }
            s[i] = free_weight > 0.0 ? remaining * weight[i] / free_weight : s_min;
            if (s[i] < s_min) {
                pinned[i] = 1;
                newly_pinned = true;
            }
        }
        if (!newly_pinned) {
            break;
        }
    }
    return s;
}

ShotPlan integer_project(std::span<const double> continuous, Shots total,
                         std::span<const double> u, Shots s_min) {
    const std::size_t n = continuous.size();
    if (u.size() != n || n == 0) {
        throw DomainError("continuous allocation and u must have the same non-zero length");
    }
    if (s_min < 0 || total < static_cast<Shots>(n) * s_min) {
        throw InfeasibilityError("cannot give every fragment " + std::to_string(s_min) +
                                 " shots out of " + std::to_string(total));
    }

    auto f = [&](std::size_t i, Shots s) {
        if (u[i] == 0.0) {
            return 0.0;
        }
        if (s <= 0) {
            return std::numeric_limits<double>::infinity();
        }
        return term(u[i], static_cast<double>(s));
    };
    // Decrease of the objective when entry i gains one shot.
    auto gain_up = [&](std::size_t i, Shots s) { return f(i, s) - f(i, s + 1); };
    // Increase of the objective when entry i loses one shot.
    auto cost_down = [&](std::size_t i, Shots s) { return f(i, s - 1) - f(i, s); };

    ShotPlan plan{std::vector<Shots>(n), total, s_min};
    auto &s = plan.shots;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::max<Shots>(s_min, std::llround(continuous[i]));
    }
    Shots delta = total - std::accumulate(s.begin(), s.end(), Shots{0});
    while (delta > 0) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (gain_up(i, s[i]) > gain_up(best, s[best])) {
                best = i;
            }
        }
        ++s[best];
        --delta;
    }
    while (delta < 0) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (s[i] > s_min && (best == n || cost_down(i, s[i]) < cost_down(best, s[best]))) {
                best = i;
            }
        }
        if (best == n) {
            throw InfeasibilityError("floors leave no entry to decrement");
        }
        --s[best];
        ++delta;
    }

    // Exchange phase: for a separable convex objective under a sum constraint,
    // no improving single-shot transfer implies a global integer optimum.
    constexpr double kRelativeSlack = 1e-14;
    while (n > 1) {
        std::size_t up1 = n, up2 = n, dn1 = n, dn2 = n;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = gain_up(i, s[i]);
            if (up1 == n || g > gain_up(up1, s[up1])) {
                up2 = up1;
                up1 = i;
            } else if (up2 == n || g > gain_up(up2, s[up2])) {
                up2 = i;
            }
            if (s[i] > s_min) {
                const double c = cost_down(i, s[i]);
                if (dn1 == n || c < cost_down(dn1, s[dn1])) {
                    dn2 = dn1;
                    dn1 = i;
                } else if (dn2 == n || c < cost_down(dn2, s[dn2])) {
                    dn2 = i;
                }
            }
        }
        if (dn1 == n) {
            break;
        }
        std::size_t to = n;
        std::size_t from = n;
        double best_delta = 0.0;
        auto consider = [&](std::size_t a, std::size_t b) {
            if (a == n || b == n || a == b) {
                return;
            }
            const double d = gain_up(a, s[a]) - cost_down(b, s[b]);
            if (d > best_delta) {
                best_delta = d;
                to = a;
                from = b;
            }
        };
        consider(up1, dn1);
        consider(up1, dn2);
        consider(up2, dn1);
        const double scale = relaxed_objective(u, std::span<const Shots>(s));
        if (to == n || !(best_delta > kRelativeSlack * scale)) {
            break;
        }
        ++s[to];
        --s[from];
    }
    return plan;
}

ShotPlan uniform_plan(std::size_t fragments, Shots total, Shots s_min) {
    if (fragments == 0) {
        throw DomainError("uniform plan needs at least one fragment");
    }
    const auto n = static_cast<Shots>(fragments);
    if (total < n * s_min) {
        throw InfeasibilityError("budget below n * s_min");
    }
    ShotPlan plan{std::vector<Shots>(fragments, total / n), total, s_min};
    for (Shots i = 0; i < total % n; ++i) {
        ++plan.shots[static_cast<std::size_t>(i)];
    }
    return plan;
}

ShotPlan proportional_plan(std::span<const double> u, Shots total, Shots s_min) {
    const std::size_t n = u.size();
    if (n == 0) {
        throw DomainError("proportional plan needs at least one fragment");
    }
    if (total < static_cast<Shots>(n) * s_min) {
        throw InfeasibilityError("budget below n * s_min");
    }
    const double sum = std::accumulate(u.begin(), u.end(), 0.0);
    if (!(sum > 0.0)) {
        return uniform_plan(n, total, s_min);
    }
    // Proportional split with floors pinned, as in water-filling but linear in u.
    std::vector<char> pinned(n, 0);
    std::vector<double> s(n, 0.0);
    const auto floor_value = static_cast<double>(s_min);
    while (true) {
        double free_weight = 0.0;
        std::size_t pinned_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i] != 0) {
                ++pinned_count;
            } else {
                free_weight += u[i];
            }
        }
        const double remaining =
            static_cast<double>(total) - floor_value * static_cast<double>(pinned_count);
        bool newly_pinned = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i] != 0) {
                s[i] = floor_value;
                continue;
            }
            s[i] = free_weight > 0.0 ? remaining * u[i] / free_weight : floor_value;
            if (s[i] < floor_value) {
                pinned[i] = 1;
                newly_pinned = true;
            }
        }
        if (!newly_pinned) {
            break;
        }
    }
    ShotPlan plan{std::vector<Shots>(n), total, s_min};
    std::vector<std::pair<double, std::size_t>> remainders;
    Shots assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        plan.shots[i] = std::max<Shots>(s_min, static_cast<Shots>(std::floor(s[i])));
        assigned += plan.shots[i];
        remainders.emplace_back(s[i] - std::floor(s[i]), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total; r = (r + 1) % n) {
        ++plan.shots[remainders[r].second];
        ++assigned;
    }
    return plan;
}

Allocation allocate(std::span<const drift::KalmanState> states, const Topology &topology,
                    std::span<const NodeId> anchors, const KernelParams &params, double rho,
                    Shots total, Shots s_min) {
    const std::size_t n = states.size();
    if (n == 0 || anchors.size() != n) {
        throw DomainError("allocation needs one anchor per fragment");
    }
    Allocation out;
    const auto tail = TailParams::for_batch(rho, n);
    std::vector<double> p(n);
    out.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.u[i] = tail_factor(std::sqrt(std::max(0.0, states[i].mean)), tail);
        p[i] = states[i].p;
    }
    out.covariance = build_covariance(topology, anchors, params, p);
    if (std::all_of(out.u.begin(), out.u.end(), [](double x) { return x == 0.0; })) {
        out.plan = uniform_plan(n, total, s_min);
        out.continuous.assign(n, static_cast<double>(total) / static_cast<double>(n));
    } else {
        out.continuous = waterfill(out.u, static_cast<double>(total), static_cast<double>(s_min));
        out.plan = integer_project(out.continuous, total, out.u, s_min);
    }
    std::vector<double> shots(out.plan.shots.begin(), out.plan.shots.end());
    out.bound = variance_bound(out.u, shots, out.covariance.sigma_tilde);
    return out;
}

CadenceTracker::CadenceTracker(Shots cadence) : cadence_(cadence) {
    if (cadence <= 0) {
        throw DomainError("reallocation cadence must be positive");
    }
}

int CadenceTracker::record(Shots executed) {
    if (executed < 0) {
        throw DomainError("executed shots must be nonnegative");
    }
    const Shots before = executed_ / cadence_;
    executed_ += executed;
    const auto fired = static_cast<int>(executed_ / cadence_ - before);
    events_ += fired;
    return fired;
}

} // namespace maestrocut::alloc
