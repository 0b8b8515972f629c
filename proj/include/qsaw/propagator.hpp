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
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "qsaw/lattice.hpp"
#include "qsaw/random.hpp"
#include "qsaw/state.hpp"

namespace qsaw {

/// The "classical error" channel: at every map step the kick strength is
/// shifted by delta_k(t), uniform in [-delta_k_max, delta_k_max] (k units).
struct StepPerturbation {
    double delta_k_max = 0.0;
    std::uint64_t seed = 0;

    /// Builds the perturbation from an amplitude given in rescaled units, deltaK = T * delta_k.
    static StepPerturbation from_deltaK(double deltaK, const LatticeParams &lattice, std::uint64_t seed) {
        return {deltaK / lattice.period, seed};
    }

    UniformStepNoise stream() const {
        return UniformStepNoise(delta_k_max, seed);
    }
};

/// psi_l <- psi_l * exp[i k_eff (theta_l - pi)^2 / 2]; angle basis.
inline void apply_kick(QuantumState &state, double k_eff) {
    if (state.basis() != Basis::angle) {
        throw std::logic_error("apply_kick requires the angle basis");
    }
    const LatticeParams &lat = state.lattice();
    auto a = state.mutable_amplitudes();
    for (std::size_t l = 0; l < a.size(); ++l) {
        double x = lat.angle_of_index(l) - std::numbers::pi;
        a[l] *= std::polar(1.0, 0.5 * k_eff * x * x);
    }
}

/// c_n <- c_n * exp[-i T n^2 / 2], n = i - N/2; momentum basis.
inline void apply_rotation(QuantumState &state, double period) {
    if (state.basis() != Basis::momentum) {
        throw std::logic_error("apply_rotation requires the momentum basis");
    }
    const LatticeParams &lat = state.lattice();
    auto a = state.mutable_amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        double n = lat.momentum_of_index(i);
        a[i] *= std::polar(1.0, -0.5 * period * n * n);
    }
}

/// One map iteration U = exp(-i T n^2/2) exp(i (k + delta_k) (theta - pi)^2 / 2).
/// Accepts either basis; returns the state in the momentum basis.
inline void step_exact_in_place(QuantumState &state, double delta_k = 0.0) {
    const LatticeParams &lat = state.lattice();
    if (state.basis() == Basis::momentum) {
        to_angle_in_place(state);
    }
    apply_kick(state, lat.kick + delta_k);
    to_momentum_in_place(state);
    apply_rotation(state, lat.period);
}

inline QuantumState step_exact(QuantumState state, double delta_k = 0.0) {
    step_exact_in_place(state, delta_k);
    return state;
}

/// Exact inverse of step_exact_in_place with the same delta_k; momentum basis in and out.
inline void step_exact_inverse_in_place(QuantumState &state, double delta_k = 0.0) {
    const LatticeParams &lat = state.lattice();
    if (state.basis() == Basis::angle) {
        to_momentum_in_place(state);
    }
    apply_rotation(state, -lat.period);
    to_angle_in_place(state);
    apply_kick(state, -(lat.kick + delta_k));
    to_momentum_in_place(state);
}

struct EvolveResult {
    QuantumState final_state;
    std::vector<double> delta_k;        // drawn value per step (empty when unperturbed)
    std::vector<QuantumState> history;  // states at t = 0..steps when requested
};

/// Iterates step_exact `steps` times, drawing a fresh delta_k each step
/// when a perturbation is given.
inline EvolveResult evolve(const QuantumState &initial, const std::optional<StepPerturbation> &perturbation,
                           int steps, bool keep_history = false) {
    if (steps < 0) {
        throw std::invalid_argument("evolve: steps must be non-negative");
    }
    EvolveResult out{initial, {}, {}};
    if (keep_history) {
        out.history.reserve(static_cast<std::size_t>(steps) + 1);
        out.history.push_back(initial);
    }
    std::optional<UniformStepNoise> noise;
    if (perturbation) {
        noise.emplace(perturbation->stream());
        out.delta_k.reserve(static_cast<std::size_t>(steps));
    }
    for (int t = 0; t < steps; ++t) {
        double dk = 0.0;
        if (noise) {
            dk = noise->next();
            out.delta_k.push_back(dk);
        }
        step_exact_in_place(out.final_state, dk);
        if (keep_history) {
            out.history.push_back(out.final_state);
        }
    }
    return out;
}

/// Evolution log rows `step,delta_k_drawn`.
inline void write_evolution_log(std::ostream &out, const std::vector<double> &delta_k) {
    auto old = out.precision(17);
    out << "step,delta_k_drawn\n";
    for (std::size_t t = 0; t < delta_k.size(); ++t) {
        out << t + 1 << ',' << delta_k[t] << '\n';
    }
    out.precision(old);
}

}  // namespace qsaw
