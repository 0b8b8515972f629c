// Copyright 2026 The qsaw Authors
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

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsaw/lattice.hpp"
#include "qsaw/random.hpp"

namespace qsaw {

/// Reduces an angle into [0, 2*pi).
inline double wrap_angle(double theta) {
    double r = std::fmod(theta, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    if (r >= two_pi) {
        r = 0.0;
    }
    return r;
}

/// Reduces a rescaled momentum into [-pi, pi).
inline double wrap_momentum(double p) {
    return wrap_angle(p + std::numbers::pi) - std::numbers::pi;
}

/// A point on the classical torus 0 <= theta < 2*pi, -pi <= p < pi.
struct PhasePoint {
    double theta = 0.0;
    double p = 0.0;

    static PhasePoint on_torus(double theta, double p) {
        return {wrap_angle(theta), wrap_momentum(p)};
    }

    bool operator==(const PhasePoint &) const = default;
};

struct ClassicalParams {
    double K = 0.0;

    bool stable() const {
        return K >= -4.0 && K <= 0.0;
    }
};

/// Random per-step kick perturbation delta_K(t), uniform in [-deltaK_max, deltaK_max].
struct KickNoiseSchedule {
    double deltaK_max = 0.0;
    std::uint64_t seed = 0;

    UniformStepNoise stream() const {
        return UniformStepNoise(deltaK_max, seed);
    }
};

/// Shortest wrap-around distance between two torus points.
inline double torus_distance(const PhasePoint &a, const PhasePoint &b) {
    double dtheta = std::abs(a.theta - b.theta);
    dtheta = std::min(dtheta, two_pi - dtheta);
    double dp = std::abs(a.p - b.p);
    dp = std::min(dp, two_pi - dp);
    return std::hypot(dtheta, dp);
}

/// One iteration of the rescaled sawtooth map:
///   p' = p + K (theta - pi),   theta' = theta + p'.
inline PhasePoint step_classical(const PhasePoint &point, double K) {
    double p = point.p + K * (point.theta - std::numbers::pi);
    double theta = point.theta + p;
    return PhasePoint::on_torus(theta, p);
}

inline PhasePoint step_classical(const PhasePoint &point, const ClassicalParams &params) {
    return step_classical(point, params.K);
}

/// Closed-form maximal Lyapunov exponent of the sawtooth map.
inline double lyapunov_exponent(const ClassicalParams &params) {
    const double K = params.K;
    if (!std::isfinite(K)) {
        throw std::invalid_argument("lyapunov_exponent: K must be finite");
    }
    if (K > 0.0) {
        return std::log((2.0 + K + std::sqrt(K * K + 4.0 * K)) / 2.0);
    }
    if (K < -4.0) {
        return std::log(std::abs((2.0 + K - std::sqrt(K * K + 4.0 * K)) / 2.0));
    }
    return 0.0;
}

/// Harmonic frequency sqrt(-K)/(2*pi) of motion in the central island; K in [-4, 0).
inline double island_frequency(const ClassicalParams &params) {
    if (!(params.K >= -4.0 && params.K < 0.0)) {
        throw std::domain_error("island_frequency requires -4 <= K < 0");
    }
    return std::sqrt(-params.K) / two_pi;
}

/// Period, in map steps, of harmonic motion in the central island.
inline double island_period(const ClassicalParams &params) {
    return 1.0 / island_frequency(params);
}

/// First-order island frequency change for K -> K + deltaK; K in (-4, 0).
inline double frequency_shift(const ClassicalParams &params, double deltaK) {
    if (!(params.K > -4.0 && params.K < 0.0)) {
        throw std::domain_error("frequency_shift requires -4 < K < 0");
    }
    return deltaK / (4.0 * std::numbers::pi * std::sqrt(-params.K));
}

/// Iterates every seed for `steps` steps. Each orbit includes its seed as entry 0.
inline std::vector<std::vector<PhasePoint>> poincare_section(std::span<const PhasePoint> seeds,
                                                             const ClassicalParams &params, int steps) {
    if (steps < 0) {
        throw std::invalid_argument("poincare_section: steps must be non-negative");
    }
    std::vector<std::vector<PhasePoint>> orbits;
    orbits.reserve(seeds.size());
    for (const PhasePoint &seed : seeds) {
        std::vector<PhasePoint> orbit;
        orbit.reserve(static_cast<std::size_t>(steps) + 1);
        PhasePoint x = PhasePoint::on_torus(seed.theta, seed.p);
        orbit.push_back(x);
        for (int t = 0; t < steps; ++t) {
            x = step_classical(x, params);
            orbit.push_back(x);
        }
        orbits.push_back(std::move(orbit));
    }
    return orbits;
}

/// Iterates with K replaced by K + deltaK(t) at step t.
inline std::vector<PhasePoint> trajectory_perturbed(const PhasePoint &point, const ClassicalParams &params,
                                                    const KickNoiseSchedule &noise, int steps) {
    if (steps < 0) {
        throw std::invalid_argument("trajectory_perturbed: steps must be non-negative");
    }
    auto stream = noise.stream();
    std::vector<PhasePoint> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    PhasePoint x = PhasePoint::on_torus(point.theta, point.p);
    out.push_back(x);
    for (int t = 0; t < steps; ++t) {
        x = step_classical(x, params.K + stream.next());
        out.push_back(x);
    }
    return out;
}

/// Benettin-style estimate of the maximal exponent from two nearby orbits,
/// renormalizing the separation to `d0` after every step.
inline double lyapunov_numerical(const PhasePoint &start, const ClassicalParams &params, int steps,
                                 double d0 = 1e-9) {
    PhasePoint a = PhasePoint::on_torus(start.theta, start.p);
    PhasePoint b = PhasePoint::on_torus(start.theta + d0, start.p);
    double sum = 0.0;
    for (int t = 0; t < steps; ++t) {
        a = step_classical(a, params);
        b = step_classical(b, params);
        double dtheta = std::remainder(b.theta - a.theta, two_pi);
        double dp = std::remainder(b.p - a.p, two_pi);
        double d = std::hypot(dtheta, dp);
        sum += std::log(d / d0);
        b = PhasePoint::on_torus(a.theta + dtheta * d0 / d, a.p + dp * d0 / d);
    }
    return sum / steps;
}

/// Writes orbits as CSV rows `seed_index,step,theta,p`.
inline void write_orbits_csv(std::ostream &out, const std::vector<std::vector<PhasePoint>> &orbits) {
    out << "seed_index,step,theta,p\n";
    auto old = out.precision(17);
    for (std::size_t s = 0; s < orbits.size(); ++s) {
        for (std::size_t t = 0; t < orbits[s].size(); ++t) {
            out << s << ',' << t << ',' << orbits[s][t].theta << ',' << orbits[s][t].p << '\n';
        }
    }
    out.precision(old);
}

/// Seven seeds inside the islands around (pi, 0) plus one seed in the diffusive layer.
inline std::vector<PhasePoint> default_section_seeds() {
    constexpr double pi = std::numbers::pi;
    return {
        {pi + 0.25, 0.0}, {pi + 0.5, 0.0}, {pi + 0.8, 0.0}, {pi + 1.1, 0.0},
        {pi + 1.4, 0.0},  {pi + 1.7, 0.0}, {pi + 2.0, 0.0}, {0.0, 0.0},
    };
}

}  // namespace qsaw
