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
#include <complex>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsaw/fft.hpp"
#include "qsaw/lattice.hpp"

namespace qsaw {

using cplx = std::complex<double>;

enum class Basis { momentum, angle };

inline const char *to_string(Basis b) {
    return b == Basis::momentum ? "momentum" : "angle";
}

/// Amplitudes of a pure state on the N = 2^n_q torus.
///
/// In the momentum basis, index i holds the amplitude of |n> with
/// n = i - N/2. In the angle basis, index l holds psi(theta_l) with
/// theta_l = 2*pi*l/N, normalized so that sum_l |psi_l|^2 = 1. The two
/// are related by psi(theta_l) = N^{-1/2} sum_n c_n e^{i n theta_l}.
class QuantumState {
  public:
    QuantumState(const LatticeParams &lattice, Basis basis, std::vector<cplx> amps)
        : lattice_(lattice), basis_(basis), amps_(std::move(amps)) {
        if (amps_.size() != lattice_.dim) {
            throw std::invalid_argument("QuantumState: amplitude count " + std::to_string(amps_.size()) +
                                        " does not match dimension " + std::to_string(lattice_.dim));
        }
    }

    static QuantumState basis_state(const LatticeParams &lattice, Basis basis, std::size_t index) {
        if (index >= lattice.dim) {
            throw std::out_of_range("basis_state: index out of range");
        }
        std::vector<cplx> amps(lattice.dim);
        amps[index] = 1.0;
        return QuantumState(lattice, basis, std::move(amps));
    }

    const LatticeParams &lattice() const {
        return lattice_;
    }
    Basis basis() const {
        return basis_;
    }
    std::size_t size() const {
        return amps_.size();
    }
    std::span<const cplx> amplitudes() const {
        return amps_;
    }
    std::span<cplx> mutable_amplitudes() {
        return amps_;
    }
    const cplx &operator[](std::size_t i) const {
        return amps_[i];
    }

    double norm_squared() const {
        double s = 0.0;
        for (const cplx &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    void normalize() {
        double n = std::sqrt(norm_squared());
        if (n == 0.0) {
            throw std::domain_error("cannot normalize the zero vector");
        }
        for (cplx &a : amps_) {
            a /= n;
        }
    }

    /// Multiplies every amplitude by e^{i phi}.
    void apply_global_phase(double phi) {
        const cplx w = std::polar(1.0, phi);
        for (cplx &a : amps_) {
            a *= w;
        }
    }

    // Basis change helpers used by the transforms; they relabel, not convert.
    void relabel_basis(Basis b) {
        basis_ = b;
    }

  private:
    LatticeParams lattice_;
    Basis basis_;
    std::vector<cplx> amps_;
};

/// Center and width of a coherent packet. sigma <= 0 selects the default
/// sigma^2 = N / (2 pi L), L = cells.
struct WavePacketSpec {
    double theta0 = 0.0;
    double p0 = 0.0;
    double sigma = 0.0;
    double cells = 1.0;

    double resolved_sigma(const LatticeParams &lattice) const {
        if (sigma > 0.0) {
            return sigma;
        }
        if (!(cells > 0.0)) {
            throw std::invalid_argument("WavePacketSpec: cells must be positive");
        }
        return std::sqrt(static_cast<double>(lattice.dim) / (two_pi * cells));
    }
};

/// Gaussian packet in the momentum basis,
///   c_n ~ exp[-(n - n0)^2 / (2 sigma^2) - i (n - n0/2) theta0],
/// with n - n0 taken as the wrapped lattice distance. The phase sign puts
/// the angle-space peak at theta0 under psi(theta) = sum_n c_n e^{i n theta}.
inline QuantumState gaussian_packet(const WavePacketSpec &spec, const LatticeParams &lattice) {
    const double sigma = spec.resolved_sigma(lattice);
    const double n_dim = static_cast<double>(lattice.dim);
    if (!(sigma > 0.0) || sigma > n_dim / 6.0) {
        throw std::invalid_argument("gaussian_packet: sigma must lie in (0, N/6] so the packet does not wrap");
    }
    if (!std::isfinite(spec.theta0) || !std::isfinite(spec.p0)) {
        throw std::invalid_argument("gaussian_packet: center must be finite");
    }
    const double n0 = spec.p0 / lattice.period;
    std::vector<cplx> amps(lattice.dim);
    for (std::size_t i = 0; i < lattice.dim; ++i) {
        double d = std::remainder(lattice.momentum_of_index(i) - n0, n_dim);
        double mag = std::exp(-d * d / (2.0 * sigma * sigma));
        amps[i] = std::polar(mag, -(d + n0 / 2.0) * spec.theta0);
    }
    QuantumState s(lattice, Basis::momentum, std::move(amps));
    s.normalize();
    return s;
}

/// Momentum-basis state with |c_n| = N^{-1/2} and i.i.d. uniform phases.
inline QuantumState random_state(const LatticeParams &lattice, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    const double mag = 1.0 / std::sqrt(static_cast<double>(lattice.dim));
    std::vector<cplx> amps(lattice.dim);
    for (cplx &a : amps) {
        a = std::polar(mag, phase(gen));
    }
    return QuantumState(lattice, Basis::momentum, std::move(amps));
}

namespace detail {

inline void alternate_signs(std::span<cplx> a) {
    for (std::size_t l = 1; l < a.size(); l += 2) {
        a[l] = -a[l];
    }
}

inline void scale(std::span<cplx> a, double s) {
    for (cplx &x : a) {
        x *= s;
    }
}

}  // namespace detail

/// In place: momentum -> angle. psi_l = (-1)^l N^{-1/2} sum_i c_i e^{2 pi i i l / N}.
inline void to_angle_in_place(QuantumState &state) {
    if (state.basis() != Basis::momentum) {
        throw std::logic_error("to_angle: state is already in the angle basis");
    }
    auto a = state.mutable_amplitudes();
    fft::transform_in_place(a, fft::Direction::backward);
    detail::scale(a, 1.0 / std::sqrt(static_cast<double>(a.size())));
    detail::alternate_signs(a);
    state.relabel_basis(Basis::angle);
}

/// In place: angle -> momentum, the inverse of to_angle_in_place.
inline void to_momentum_in_place(QuantumState &state) {
    if (state.basis() != Basis::angle) {
        throw std::logic_error("to_momentum: state is already in the momentum basis");
    }
    auto a = state.mutable_amplitudes();
    detail::alternate_signs(a);
    fft::transform_in_place(a, fft::Direction::forward);
    detail::scale(a, 1.0 / std::sqrt(static_cast<double>(a.size())));
    state.relabel_basis(Basis::momentum);
}

inline QuantumState to_angle(QuantumState state) {
    to_angle_in_place(state);
    return state;
}

inline QuantumState to_momentum(QuantumState state) {
    to_momentum_in_place(state);
    return state;
}

inline void check_compatible(const QuantumState &a, const QuantumState &b) {
    if (a.size() != b.size() || a.lattice().n_qubits != b.lattice().n_qubits) {
        throw std::invalid_argument("states live in different Hilbert spaces");
    }
    if (a.basis() != b.basis()) {
        throw std::invalid_argument("states are expressed in different bases");
    }
}

/// <a|b>.
inline cplx overlap(const QuantumState &a, const QuantumState &b) {
    check_compatible(a, b);
    cplx s = 0.0;
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::conj(x[i]) * y[i];
    }
    return s;
}

/// |<a|b>|^2, evaluated symmetrically so fidelity(a, b) == fidelity(b, a) bit-for-bit.
inline double fidelity(const QuantumState &a, const QuantumState &b) {
    check_compatible(a, b);
    double re = 0.0;
    double im = 0.0;
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return re * re + im * im;
}

inline double max_abs_difference(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("max_abs_difference: size mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

/// Phase-space moments of a state. Widths are reported as the 1/e
/// half-width of the probability density, sqrt(2 * variance), which is the
/// convention under which the default packet has width sqrt(hbar_eff) in
/// both theta and p.
struct PacketMoments {
    double n_mean = 0.0;
    double n_width = 0.0;
    double p_mean = 0.0;   // circular mean in [-pi, pi)
    double p_width = 0.0;  // from the circular variance
    double theta_mean = 0.0;   // circular mean in [0, 2 pi)
    double theta_width = 0.0;  // from the circular variance
};

inline PacketMoments moments(const QuantumState &state) {
    QuantumState mom = state.basis() == Basis::momentum ? state : to_momentum(state);
    QuantumState ang = state.basis() == Basis::angle ? state : to_angle(state);
    const LatticeParams &lat = state.lattice();
    PacketMoments m;
    double s1 = 0.0;
    double s2 = 0.0;
    auto c = mom.amplitudes();
    for (std::size_t i = 0; i < c.size(); ++i) {
        double w = std::norm(c[i]);
        double n = lat.momentum_of_index(i);
        s1 += w * n;
        s2 += w * n * n;
    }
    m.n_mean = s1;
    m.n_width = std::sqrt(2.0 * std::max(0.0, s2 - s1 * s1));
    auto circular = [](cplx z, double &mean, double &width) {
        double r = std::min(1.0, std::abs(z));
        mean = std::arg(z);
        // circular standard deviation sqrt(-2 ln R), reported as sqrt(2) * std.
        width = std::sqrt(2.0 * -2.0 * std::log(r));
    };

    cplx zp = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        zp += std::norm(c[i]) * std::polar(1.0, lat.period * lat.momentum_of_index(i));
    }
    circular(zp, m.p_mean, m.p_width);
    if (m.p_mean >= std::numbers::pi) {
        m.p_mean -= two_pi;
    }

    cplx z = 0.0;
    auto a = ang.amplitudes();
    for (std::size_t l = 0; l < a.size(); ++l) {
        z += std::norm(a[l]) * std::polar(1.0, lat.angle_of_index(l));
    }
    circular(z, m.theta_mean, m.theta_width);
    if (m.theta_mean < 0.0) {
        m.theta_mean += two_pi;
    }
    return m;
}

/// Writes a state snapshot: comment header with the lattice, then `index,re,im`.
inline void write_snapshot(std::ostream &out, const QuantumState &state) {
    const LatticeParams &lat = state.lattice();
    auto old = out.precision(17);
    out << "# qsaw-state n_qubits=" << lat.n_qubits << " basis=" << to_string(state.basis()) << " K=" << lat.K
        << " T=" << lat.period << " k=" << lat.kick << '\n';
    out << "index,re,im\n";
    auto a = state.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << i << ',' << a[i].real() << ',' << a[i].imag() << '\n';
    }
    out.precision(old);
}

inline QuantumState read_snapshot(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# qsaw-state", 0) != 0) {
        throw std::runtime_error("read_snapshot: missing qsaw-state header");
    }
    int n_qubits = -1;
    double K = 0.0;
    Basis basis = Basis::momentum;
    std::istringstream hs(line.substr(12));
    std::string tok;
    while (hs >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        std::string key = tok.substr(0, eq);
        std::string val = tok.substr(eq + 1);
        if (key == "n_qubits") {
            n_qubits = std::stoi(val);
        } else if (key == "K") {
            K = std::stod(val);
        } else if (key == "basis") {
            if (val == "momentum") {
                basis = Basis::momentum;
            } else if (val == "angle") {
                basis = Basis::angle;
            } else {
                throw std::runtime_error("read_snapshot: unknown basis " + val);
            }
        }
    }
    auto lattice = LatticeParams::make(n_qubits, K);
    std::getline(in, line);  // column header
    std::vector<cplx> amps(lattice.dim);
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::size_t idx;
        char comma;
        double re, im;
        if (!(ls >> idx >> comma >> re >> comma >> im) || idx >= lattice.dim) {
            throw std::runtime_error("read_snapshot: malformed row: " + line);
        }
        amps[idx] = {re, im};
        ++seen;
    }
    if (seen != lattice.dim) {
        throw std::runtime_error("read_snapshot: expected " + std::to_string(lattice.dim) + " rows");
    }
    return QuantumState(lattice, basis, std::move(amps));
}

}  // namespace qsaw
