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

#include "maestrocut/cascade.hpp"

#include "maestrocut/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace maestrocut::cascade {

const char *to_string(Estimator e) noexcept {
    return e == Estimator::MLE ? "MLE" : "Shadows";
}

double BiasModel::operator()(double entropy_bits) const noexcept {
    return b0 * std::max(0.0, entropy_bits - h_thr);
}

void CascadeFit::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw ConfigurationError("cascade fit needs alpha > 0 and beta > 0");
    }
    if (!(bias.b0 >= 0.0) || !std::isfinite(bias.h_thr)) {
        throw ConfigurationError("bias model needs b0 >= 0 and a finite threshold");
    }
}

double pilot_entropy(std::span<const std::uint64_t> counts) {
    const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) {
        throw DomainError("entropy of an empty histogram");
    }
    const auto n = static_cast<double>(total);
    double h = 0.0;
    for (const auto c : counts) {
        if (c != 0) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log2(p);
        }
    }
    return std::max(0.0, h);
}

std::int64_t pilot_shots(std::int64_t shots, double fraction) {
    if (shots < 0 || !(fraction >= 0.0) || fraction > 1.0) {
        throw DomainError("pilot budget needs shots >= 0 and fraction in [0, 1]");
    }
    if (shots == 0) {
        return 0;
    }
    const auto p = static_cast<std::int64_t>(std::ceil(fraction * static_cast<double>(shots)));
    return std::clamp<std::int64_t>(p, 1, shots);
}

PredictedMse predict_mse(const CascadeFit &fit, double s, double entropy_bits) {
    if (!(s >= 1.0)) {
        throw DomainError("shot count must be at least 1, got " + std::to_string(s));
    }
    const double b = fit.bias(entropy_bits);
    return {fit.alpha / s, fit.beta / (s * s) + b * b};
}

Estimator choose_estimator(const CascadeFit &fit, double s, double entropy_bits) {
    const auto m = predict_mse(fit, s, entropy_bits);
    return m.mle <= m.shadows ? Estimator::MLE : Estimator::Shadows;
}

std::optional<std::int64_t> crossover_shots(const CascadeFit &fit, double entropy_bits) {
    fit.validate();
    const double b = fit.bias(entropy_bits);
    const double b2 = b * b;
    // MLE wins on the interval of s where b^2 s^2 - alpha s + beta <= 0.
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    if (b2 == 0.0) {
        lo = fit.beta / fit.alpha;
    } else {
        const double disc = fit.alpha * fit.alpha - 4.0 * b2 * fit.beta;
        if (disc < 0.0) {
            return std::nullopt;
        }
        const double root = std::sqrt(disc);
        lo = (fit.alpha - root) / (2.0 * b2);
        hi = (fit.alpha + root) / (2.0 * b2);
    }
    if (hi < 1.0 - 1e-9) {
        return std::nullopt;
    }
    // The roots are only a guide; the answer is decided by the same comparison
    // choose_estimator uses, so the two can never disagree.
    const auto guess = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(lo)) - 1);
    for (std::int64_t s = guess; s <= guess + 2; ++s) {
        if (choose_estimator(fit, static_cast<double>(s), entropy_bits) == Estimator::MLE) {
            return s;
        }
    }
    return std::nullopt;
}

namespace {

struct ArmData {
    std::vector<double> s;
    std::vector<double> h;
    std::vector<double> y;
};

void require_distinct(const ArmData &arm, const char *name) {
    const std::set<double> distinct(arm.s.begin(), arm.s.end());
    if (distinct.size() < 3) {
        throw FitError(std::string(name) + " arm needs at least 3 distinct shot counts, got " +
                       std::to_string(distinct.size()));
    }
}

double log_log_slope(const ArmData &arm) {
    std::map<double, std::pair<double, int>> by_s;
    for (std::size_t i = 0; i < arm.s.size(); ++i) {
        auto &[sum, count] = by_s[arm.s[i]];
        sum += arm.y[i];
        ++count;
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto &[s, acc] : by_s) {
        const double m = acc.first / acc.second;
        if (m > 0.0) {
            xs.push_back(std::log(s));
            ys.push_back(std::log(m));
        }
    }
    if (xs.size() < 2) {
        throw FitError("shadows arm has too few positive errors for a slope check");
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

struct NnlsResult {
    double a = 0.0;
    double c = 0.0;
    double residual = std::numeric_limits<double>::infinity();
};

/// min ||y - a*x1 - c*x2||^2 over a, c >= 0.
NnlsResult nnls2(const std::vector<double> &x1, const std::vector<double> &x2,
                 const std::vector<double> &y) {
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, s1y = 0.0, s2y = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s11 += x1[i] * x1[i];
        s12 += x1[i] * x2[i];
        s22 += x2[i] * x2[i];
        s1y += x1[i] * y[i];
        s2y += x2[i] * y[i];
    }
    auto residual = [&](double a, double c) {
        double r = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e = y[i] - a * x1[i] - c * x2[i];
            r += e * e;
        }
        return r;
    };
    NnlsResult best;
    auto offer = [&](double a, double c) {
        if (a < 0.0 || c < 0.0) {
            return;
        }
        const double r = residual(a, c);
        if (r < best.residual) {
            best = {a, c, r};
        }
    };
    const double det = s11 * s22 - s12 * s12;
    if (det > 1e-300 * std::max(1.0, s11 * s22)) {
        offer((s1y * s22 - s2y * s12) / det, (s2y * s11 - s1y * s12) / det);
    }
    if (s11 > 0.0) {
        offer(std::max(0.0, s1y / s11), 0.0);
    }
    if (s22 > 0.0) {
        offer(0.0, std::max(0.0, s2y / s22));
    }
    offer(0.0, 0.0);
    return best;
}

} // namespace

CascadeFit fit_from_pilots(std::span<const PilotSample> samples) {
    ArmData shadows;
    ArmData mle;
    for (const auto &p : samples) {
        if (!(p.s >= 1.0) || !(p.squared_error >= 0.0) || !(p.entropy_bits >= 0.0)) {
            throw FitError("pilot samples need s >= 1, H >= 0 and nonnegative errors");
        }
        auto &arm = p.arm == Estimator::Shadows ? shadows : mle;
        arm.s.push_back(p.s);
        arm.h.push_back(p.entropy_bits);
        arm.y.push_back(p.squared_error);
    }
    require_distinct(shadows, "shadows");
    require_distinct(mle, "MLE");

    CascadeFit fit;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < shadows.s.size(); ++i) {
        const double x = 1.0 / shadows.s[i];
        sxx += x * x;
        sxy += x * shadows.y[i];
    }
    fit.alpha = sxy / sxx;
    if (!(fit.alpha > 0.0)) {
        throw FitError("shadows arm gives a nonpositive alpha");
    }
    const double slope = log_log_slope(shadows);
    if (slope > -0.5) {
        throw FitError("shadows errors do not decay like 1/s (log-log slope " +
                       std::to_string(slope) + ")");
    }

    std::vector<double> x1(mle.s.size());
    for (std::size_t i = 0; i < mle.s.size(); ++i) {
        x1[i] = 1.0 / (mle.s[i] * mle.s[i]);
    }
    const double h_max = *std::max_element(mle.h.begin(), mle.h.end());
    NnlsResult best;
    double best_thr = fit.bias.h_thr;
    std::vector<double> x2(mle.s.size());
    for (double thr = 0.0; thr <= h_max + 1e-12; thr += 0.125) {
        for (std::size_t i = 0; i < mle.s.size(); ++i) {
            const double excess = std::max(0.0, mle.h[i] - thr);
            x2[i] = excess * excess;
        }
        const auto r = nnls2(x1, x2, mle.y);
        if (r.residual < best.residual) {
            best = r;
            best_thr = thr;
        }
    }
    if (!(best.a > 0.0)) {
        throw FitError("MLE arm gives a nonpositive beta");
    }
    fit.beta = best.a;
    fit.bias = {std::sqrt(best.c), best_thr};
    fit.validate();
    return fit;
}

} // namespace maestrocut::cascade
