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

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsaw/lattice.hpp"
#include "qsaw/random.hpp"
#include "qsaw/state.hpp"

namespace qsaw {

enum class GateKind {
    hadamard,
    phase,             // diag(1, e^{i angle}) on one qubit
    controlled_phase,  // diag(1, 1, 1, e^{i angle}) on (control, target)
};

inline const char *to_string(GateKind k) {
    switch (k) {
        case GateKind::hadamard:
            return "H";
        case GateKind::phase:
            return "P";
        case GateKind::controlled_phase:
            return "CP";
    }
    return "?";
}

/// Qubit q carries the bit of weight 2^q of the register index.
struct Gate {
    GateKind kind = GateKind::hadamard;
    int target = 0;
    int control = -1;
    double angle = 0.0;

    static Gate hadamard(int target) {
        return {GateKind::hadamard, target, -1, 0.0};
    }
    static Gate phase(int target, double angle) {
        return {GateKind::phase, target, -1, angle};
    }
    static Gate controlled_phase(int control, int target, double angle) {
        return {GateKind::controlled_phase, target, control, angle};
    }

    /// Number of dephasing parameters the gate error carries.
    int error_phase_count() const {
        return kind == GateKind::controlled_phase ? 4 : 2;
    }
};

/// Gate list realizing one sawtooth-map step on the momentum register.
struct CircuitProgram {
    int n_qubits = 0;
    std::vector<Gate> gates;
    // Constant phase dropped from the quadratic blocks; the circuit equals
    // e^{-i global_phase} times the exact one-step propagator.
    double global_phase = 0.0;

    std::size_t hadamard_count() const {
        std::size_t c = 0;
        for (const Gate &g : gates) {
            c += g.kind == GateKind::hadamard;
        }
        return c;
    }

    /// Controlled-phase count; single-qubit phases emitted by the diagonal blocks count here too.
    std::size_t cphase_count() const {
        return gates.size() - hadamard_count();
    }

    std::size_t size() const {
        return gates.size();
    }
};

namespace detail {

inline double reduce_phase(double angle) {
    return std::remainder(angle, two_pi);
}

// Hadamard/controlled-phase ladder C with F = R C, where F is the
// e^{+2 pi i x y / N} Fourier transform and R reverses qubit order.
inline void append_fourier_ladder(std::vector<Gate> &gates, int n) {
    for (int q = n - 1; q >= 0; --q) {
        gates.push_back(Gate::hadamard(q));
        for (int c = q - 1; c >= 0; --c) {
            gates.push_back(Gate::controlled_phase(c, q, two_pi / std::ldexp(1.0, q - c + 1)));
        }
    }
}

inline void append_inverse_fourier_ladder(std::vector<Gate> &gates, int n) {
    std::vector<Gate> forward;
    append_fourier_ladder(forward, n);
    for (auto it = forward.rbegin(); it != forward.rend(); ++it) {
        Gate g = *it;
        g.angle = -g.angle;
        gates.push_back(g);
    }
}

// Emits exp[i A (x - x0)^2] with x = sum_q w_q b_q as one gate per ordered
// qubit pair: single-qubit phases on the diagonal, controlled phases
// A w_a w_b off it (each symmetric cross term split over two gates).
// Returns the dropped constant A x0^2.
inline double append_quadratic_phase(std::vector<Gate> &gates, int n, double A, double x0,
                                     std::span<const double> weights) {
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            double wa = weights[static_cast<std::size_t>(a)];
            double wb = weights[static_cast<std::size_t>(b)];
            if (a == b) {
                gates.push_back(Gate::phase(a, reduce_phase(A * wa * wa - 2.0 * A * x0 * wa)));
            } else {
                gates.push_back(Gate::controlled_phase(a, b, reduce_phase(A * wa * wb)));
            }
        }
    }
    return A * x0 * x0;
}

}  // namespace detail

/// One map step as: Fourier ladder (momentum -> bit-reversed angle register),
/// kick block, inverse ladder, free-rotation block.
inline CircuitProgram build_sawtooth_circuit(const LatticeParams &lattice) {
    const int n = lattice.n_qubits;
    const double half = static_cast<double>(lattice.dim / 2);
    CircuitProgram prog;
    prog.n_qubits = n;
    prog.gates.reserve(static_cast<std::size_t>(3 * n * n + n));

    detail::append_fourier_ladder(prog.gates, n);

    // Kick: k (theta_l - pi)^2 / 2 = (k T^2 / 2) (l - N/2)^2, with angle
    // index l read bit-reversed from the register.
    std::vector<double> reversed(static_cast<std::size_t>(n));
    std::vector<double> natural(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        reversed[static_cast<std::size_t>(q)] = std::ldexp(1.0, n - 1 - q);
        natural[static_cast<std::size_t>(q)] = std::ldexp(1.0, q);
    }
    double kick_coeff = 0.5 * lattice.kick * lattice.period * lattice.period;
    double dropped = detail::append_quadratic_phase(prog.gates, n, kick_coeff, half, reversed);

    detail::append_inverse_fourier_ladder(prog.gates, n);

    // Free rotation: -T n^2 / 2 with n = i - N/2.
    dropped += detail::append_quadratic_phase(prog.gates, n, -0.5 * lattice.period, half, natural);

    prog.global_phase = detail::reduce_phase(dropped);
    return prog;
}

using Mat2 = std::array<cplx, 4>;  // row-major

namespace kernels {

inline int qubit_count(std::span<const cplx> amps) {
    if (!std::has_single_bit(amps.size())) {
        throw std::invalid_argument("register size must be a power of two");
    }
    return std::countr_zero(amps.size());
}

inline void check_qubit(std::span<const cplx> amps, int q) {
    if (q < 0 || q >= qubit_count(amps)) {
        throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
    }
}

/// Multiplies amplitude i by phases[b] where b is the target bit of i.
inline void diagonal_1q(std::span<cplx> amps, int target, const std::array<cplx, 2> &phases) {
    const std::size_t mask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        amps[i] *= phases[(i & mask) ? 1 : 0];
    }
}

/// Multiplies amplitude i by phases[2 * b_control + b_target].
inline void diagonal_2q(std::span<cplx> amps, int control, int target, const std::array<cplx, 4> &phases) {
    for (std::size_t i = 0; i < amps.size(); ++i) {
        std::size_t s = (((i >> control) & 1u) << 1) | ((i >> target) & 1u);
        amps[i] *= phases[s];
    }
}

inline void matrix_1q(std::span<cplx> amps, int target, const Mat2 &m) {
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            cplx a = amps[i];
            cplx b = amps[i + stride];
            amps[i] = m[0] * a + m[1] * b;
            amps[i + stride] = m[2] * a + m[3] * b;
        }
    }
}

}  // namespace kernels

/// Rotation by pi about u = (sin th cos ph, sin th sin ph, cos th), th = pi/4 + nu1,
/// ph = nu2. Returns u.sigma; the exact rotation is -i u.sigma, whose global
/// phase is dropped unless keep_global_phase is set.
inline Mat2 tilted_hadamard(double nu1, double nu2, bool keep_global_phase = false) {
    const double th = std::numbers::pi / 4.0 + nu1;
    const double c = std::cos(th);
    const double s = std::sin(th);
    Mat2 m{cplx(c, 0.0), std::polar(s, -nu2), std::polar(s, nu2), cplx(-c, 0.0)};
    if (keep_global_phase) {
        for (cplx &x : m) {
            x *= cplx(0.0, -1.0);
        }
    }
    return m;
}

inline void validate_gate(std::span<const cplx> amps, const Gate &gate) {
    kernels::check_qubit(amps, gate.target);
    if (gate.kind == GateKind::controlled_phase) {
        kernels::check_qubit(amps, gate.control);
        if (gate.control == gate.target) {
            throw std::invalid_argument("controlled_phase: control equals target");
        }
    }
}

/// Ideal gate on a raw register.
inline void apply_gate(std::span<cplx> amps, const Gate &gate) {
    validate_gate(amps, gate);
    switch (gate.kind) {
        case GateKind::hadamard:
            kernels::matrix_1q(amps, gate.target, tilted_hadamard(0.0, 0.0));
            break;
        case GateKind::phase:
            kernels::diagonal_1q(amps, gate.target, {cplx(1.0), std::polar(1.0, gate.angle)});
            break;
        case GateKind::controlled_phase:
            kernels::diagonal_2q(amps, gate.control, gate.target,
                                 {cplx(1.0), cplx(1.0), cplx(1.0), std::polar(1.0, gate.angle)});
            break;
    }
}

inline void apply_gate(QuantumState &state, const Gate &gate) {
    apply_gate(state.mutable_amplitudes(), gate);
}

/// Error parameters of one gate application. Phase gates use eps[0..1] or
/// eps[0..3]; Hadamards use nu1, nu2.
struct NoisyGateDraw {
    std::array<double, 4> eps{};
    double nu1 = 0.0;
    double nu2 = 0.0;

    bool operator==(const NoisyGateDraw &) const = default;
};

/// C~ = E C with E = diag(e^{i eps_s}) on the gate's subspace; Hadamards become
/// pi-rotations about a tilted axis.
inline void apply_noisy_gate(std::span<cplx> amps, const Gate &gate, const NoisyGateDraw &draw,
                             bool keep_hadamard_phase = false) {
    validate_gate(amps, gate);
    switch (gate.kind) {
        case GateKind::hadamard:
            kernels::matrix_1q(amps, gate.target, tilted_hadamard(draw.nu1, draw.nu2, keep_hadamard_phase));
            break;
        case GateKind::phase:
            kernels::diagonal_1q(amps, gate.target,
                                 {std::polar(1.0, draw.eps[0]), std::polar(1.0, draw.eps[1] + gate.angle)});
            break;
        case GateKind::controlled_phase:
            kernels::diagonal_2q(amps, gate.control, gate.target,
                                 {std::polar(1.0, draw.eps[0]), std::polar(1.0, draw.eps[1]),
                                  std::polar(1.0, draw.eps[2]), std::polar(1.0, draw.eps[3] + gate.angle)});
            break;
    }
}

inline void apply_noisy_gate(QuantumState &state, const Gate &gate, const NoisyGateDraw &draw) {
    apply_noisy_gate(state.mutable_amplitudes(), gate, draw);
}

enum class NoiseRegime {
    memoryless,  // fresh parameters at every gate application
    static_,     // parameters frozen per gate position
};

inline const char *to_string(NoiseRegime r) {
    return r == NoiseRegime::memoryless ? "memoryless" : "static";
}

inline NoiseRegime parse_regime(const std::string &s) {
    if (s == "memoryless") {
        return NoiseRegime::memoryless;
    }
    if (s == "static") {
        return NoiseRegime::static_;
    }
    throw std::invalid_argument("unknown noise regime: " + s);
}

struct NoiseModel {
    double epsilon = 0.0;
    NoiseRegime regime = NoiseRegime::memoryless;
    std::uint64_t seed = 0;
};

/// Draws the error parameters of every gate of one step, in program order.
/// The stream for step t is derived from (seed, t); static noise always uses t = 0.
inline std::vector<NoisyGateDraw> draw_step_errors(const CircuitProgram &program, const NoiseModel &noise,
                                                   std::uint64_t step) {
    if (noise.epsilon < 0.0) {
        throw std::invalid_argument("noise epsilon must be non-negative");
    }
    std::uint64_t key = noise.regime == NoiseRegime::static_ ? 0 : step;
    auto gen = derive_stream(noise.seed, StreamTag::gate_noise, {key});
    std::vector<NoisyGateDraw> draws(program.gates.size());
    for (std::size_t g = 0; g < program.gates.size(); ++g) {
        const Gate &gate = program.gates[g];
        NoisyGateDraw &d = draws[g];
        if (gate.kind == GateKind::hadamard) {
            d.nu1 = uniform_symmetric(gen, noise.epsilon);
            d.nu2 = uniform_symmetric(gen, noise.epsilon);
        } else {
            for (int s = 0; s < gate.error_phase_count(); ++s) {
                d.eps[static_cast<std::size_t>(s)] = uniform_symmetric(gen, noise.epsilon);
            }
        }
    }
    return draws;
}

/// Noiseless execution of one step; momentum register in and out.
inline void run_step_ideal(QuantumState &state, const CircuitProgram &program) {
    if (state.basis() != Basis::momentum) {
        throw std::logic_error("circuit steps act on the momentum register");
    }
    auto amps = state.mutable_amplitudes();
    for (const Gate &g : program.gates) {
        apply_gate(amps, g);
    }
}

/// Applies every gate of the program with its error draw, in program order.
inline void run_step_noisy(QuantumState &state, const CircuitProgram &program,
                           std::span<const NoisyGateDraw> draws) {
    if (state.basis() != Basis::momentum) {
        throw std::logic_error("circuit steps act on the momentum register");
    }
    if (draws.size() != program.gates.size()) {
        throw std::invalid_argument("run_step_noisy: one draw per gate required");
    }
    auto amps = state.mutable_amplitudes();
    for (std::size_t g = 0; g < program.gates.size(); ++g) {
        apply_noisy_gate(amps, program.gates[g], draws[g]);
    }
}

/// A program bound to a noise model; step t uses draw_step_errors(program, noise, t).
class NoisyCircuit {
  public:
    NoisyCircuit(CircuitProgram program, NoiseModel noise) : program_(std::move(program)), noise_(noise) {
    }

    const CircuitProgram &program() const {
        return program_;
    }
    const NoiseModel &noise() const {
        return noise_;
    }

    std::vector<NoisyGateDraw> draws(std::uint64_t step) const {
        if (noise_.regime == NoiseRegime::static_) {
            if (!frozen_) {
                frozen_ = draw_step_errors(program_, noise_, 0);
            }
            return *frozen_;
        }
        return draw_step_errors(program_, noise_, step);
    }

    void run_step(QuantumState &state, std::uint64_t step) const {
        if (noise_.epsilon == 0.0) {
            run_step_ideal(state, program_);
            return;
        }
        if (noise_.regime == NoiseRegime::static_) {
            if (!frozen_) {
                frozen_ = draw_step_errors(program_, noise_, 0);
            }
            run_step_noisy(state, program_, *frozen_);
            return;
        }
        auto d = draw_step_errors(program_, noise_, step);
        run_step_noisy(state, program_, d);
    }

  private:
    CircuitProgram program_;
    NoiseModel noise_;
    mutable std::optional<std::vector<NoisyGateDraw>> frozen_;
};

/// Text listing `position,kind,qubits,angle`.
inline void write_circuit_dump(std::ostream &out, const CircuitProgram &program) {
    auto old = out.precision(17);
    out << "position,kind,qubits,angle\n";
    for (std::size_t g = 0; g < program.gates.size(); ++g) {
        const Gate &gate = program.gates[g];
        out << g << ',' << to_string(gate.kind) << ',';
        if (gate.kind == GateKind::controlled_phase) {
            out << gate.control << ' ' << gate.target;
        } else {
            out << gate.target;
        }
        out << ',' << gate.angle << '\n';
    }
    out.precision(old);
}

/// Noise-draw log rows `step,gate_position,kind,p0,p1,p2,p3`; Hadamard rows carry (nu1, nu2).
inline void write_draw_log(std::ostream &out, const CircuitProgram &program, std::uint64_t step,
                           std::span<const NoisyGateDraw> draws, bool header = true) {
    auto old = out.precision(17);
    if (header) {
        out << "step,gate_position,kind,p0,p1,p2,p3\n";
    }
    for (std::size_t g = 0; g < draws.size(); ++g) {
        const Gate &gate = program.gates[g];
        const NoisyGateDraw &d = draws[g];
        out << step << ',' << g << ',' << to_string(gate.kind);
        if (gate.kind == GateKind::hadamard) {
            out << ',' << d.nu1 << ',' << d.nu2 << ",,";
        } else if (gate.kind == GateKind::phase) {
            out << ',' << d.eps[0] << ',' << d.eps[1] << ",,";
        } else {
            out << ',' << d.eps[0] << ',' << d.eps[1] << ',' << d.eps[2] << ',' << d.eps[3];
        }
        out << '\n';
    }
    out.precision(old);
}

}  // namespace qsaw
