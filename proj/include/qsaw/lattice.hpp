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
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qsaw {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Scales of the quantized sawtooth map on an N = 2^n_q torus.
///
/// T = 2*pi/N plays the role of the effective Planck constant and
/// k = K/T is the kick strength seen by the quantum propagator. Every
/// other module derives its scales from here.
struct LatticeParams {
    int n_qubits = 0;
    std::size_t dim = 0;
    double period = 0.0;  // T
    double K = 0.0;
    double kick = 0.0;  // k = K / T

    static LatticeParams make(int n_qubits, double K) {
        if (n_qubits < 1 || n_qubits > 26) {
            throw std::invalid_argument("n_qubits must lie in [1, 26], got " + std::to_string(n_qubits));
        }
        if (!std::isfinite(K)) {
            throw std::invalid_argument("K must be finite");
        }
        LatticeParams p;
        p.n_qubits = n_qubits;
        p.dim = std::size_t{1} << n_qubits;
        p.period = two_pi / static_cast<double>(p.dim);
        p.K = K;
        p.kick = K / p.period;
        return p;
    }

    double hbar_eff() const {
        return period;
    }

    /// Momentum quantum number of register index i: n = i - N/2.
    double momentum_of_index(std::size_t i) const {
        return static_cast<double>(i) - static_cast<double>(dim / 2);
    }

    /// Angle grid point theta_l = 2*pi*l/N.
    double angle_of_index(std::size_t l) const {
        return period * static_cast<double>(l);
    }

    bool same_space(const LatticeParams &other) const {
        return n_qubits == other.n_qubits && K == other.K;
    }
};

}  // namespace qsaw
