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


#include <cmath>
#include <complex>
#include <sstream>

#include <gtest/gtest.h>

#include "qsaw/state.hpp"

namespace qsaw {
namespace {

TEST(Lattice, Scales) {
    for (int nq : {1, 5, 12, 20}) {
        auto l = LatticeParams::make(nq, 0.7);
        EXPECT_EQ(l.dim, std::size_t{1} << nq);
        EXPECT_NEAR(l.period * static_cast<double>(l.dim), two_pi, 1e-12);
        EXPECT_NEAR(l.kick * l.period, 0.7, 1e-15);
    }
    auto l = LatticeParams::make(3, 0.0);
    EXPECT_EQ(l.momentum_of_index(0), -4.0);
    EXPECT_EQ(l.momentum_of_index(7), 3.0);
    EXPECT_THROW(LatticeParams::make(0, 0.0), std::invalid_argument);
    EXPECT_THROW(LatticeParams::make(27, 0.0), std::invalid_argument);
    EXPECT_THROW(LatticeParams::make(4, NAN), std::invalid_argument);
}

TEST(GaussianPacket, DefaultWidthsAndCenter) {
    auto l = LatticeParams::make(12, 0.5);
    auto s = gaussian_packet({1.0, 0.0}, l);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    auto m = moments(s);
    EXPECT_NEAR(m.n_mean, 0.0, 1e-6);
    EXPECT_NEAR(m.theta_mean, 1.0, 1e-9);
    EXPECT_NEAR(m.p_width, 0.0392, 1e-4);
    EXPECT_NEAR(m.theta_width, 0.0392, 1e-4);
    EXPECT_NEAR(m.theta_width, std::sqrt(l.hbar_eff()), 1e-9);
}

TEST(GaussianPacket, MinimumUncertainty) {
    for (int nq : {8, 10, 12}) {
        auto l = LatticeParams::make(nq, 0.5);
        auto m = moments(gaussian_packet({2.0, 0.7}, l));
        EXPECT_NEAR(m.theta_width * m.p_width / l.hbar_eff(), 1.0, 0.05) << nq;
        EXPECT_NEAR(m.theta_mean, 2.0, 1e-6);
        EXPECT_NEAR(m.p_mean, 0.7, l.period);
    }
}

TEST(GaussianPacket, NarrowPacketConcentrated) {
    auto l = LatticeParams::make(8, 0.5);
    auto s = gaussian_packet({1.0, 0.0, 1.0}, l);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    double central = 0.0;
    for (std::size_t i = l.dim / 2 - 3; i <= l.dim / 2 + 3; ++i) {
        central += std::norm(s[i]);
    }
    EXPECT_GT(central, 0.9999);
}

TEST(GaussianPacket, CenterNearMomentumSeamWraps) {
    auto l = LatticeParams::make(10, 0.5);
    auto m = moments(gaussian_packet({1.0, 3.1}, l));
    EXPECT_NEAR(m.theta_mean, 1.0, 1e-6);
    EXPECT_NEAR(m.theta_width * m.p_width / l.hbar_eff(), 1.0, 0.05);
}

TEST(GaussianPacket, RejectsTooWide) {
    auto l = LatticeParams::make(6, 0.5);
    EXPECT_THROW(gaussian_packet({1.0, 0.0, 20.0}, l), std::invalid_argument);
}

TEST(RandomState, ModuliAndNorm) {
    auto l = LatticeParams::make(1, 0.5);
    auto s = random_state(l, 4);
    EXPECT_NEAR(std::abs(s[0]), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(s[1]), 1.0 / std::sqrt(2.0), 1e-15);
    auto big = random_state(LatticeParams::make(10, 0.5), 11);
    EXPECT_NEAR(big.norm_squared(), 1.0, 1e-12);
}

TEST(RandomState, PairOverlapIsOneOverN) {
    auto l = LatticeParams::make(6, 0.5);
    const int pairs = 400;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < pairs; ++i) {
        double f = fidelity(random_state(l, 2 * i + 1), random_state(l, 2 * i + 2));
        sum += f;
        sum2 += f * f;
    }
    double mean = sum / pairs;
    double se = std::sqrt((sum2 / pairs - mean * mean) / pairs);
    EXPECT_NEAR(mean, 1.0 / 64.0, 3.0 * se);
}

TEST(Transforms, DeltaIsFlat) {
    auto l = LatticeParams::make(7, 0.5);
    auto s = QuantumState::basis_state(l, Basis::momentum, l.dim / 2);
    auto a = to_angle(s);
    EXPECT_EQ(a.basis(), Basis::angle);
    for (std::size_t i = 0; i < l.dim; ++i) {
        EXPECT_NEAR(std::norm(a[i]), 1.0 / static_cast<double>(l.dim), 1e-15);
    }
}

TEST(Transforms, PlaneWaveConvention) {
    // |n> maps to N^{-1/2} e^{i n theta_l}
    auto l = LatticeParams::make(5, 0.5);
    std::size_t idx = 19;
    double n = l.momentum_of_index(idx);
    auto a = to_angle(QuantumState::basis_state(l, Basis::momentum, idx));
    for (std::size_t j = 0; j < l.dim; ++j) {
        cplx expect = std::polar(1.0 / std::sqrt(32.0), n * l.angle_of_index(j));
        EXPECT_NEAR(std::abs(a[j] - expect), 0.0, 1e-14);
    }
}

TEST(Transforms, RoundTripAndUnitarity) {
    auto l = LatticeParams::make(9, 0.5);
    auto a = random_state(l, 1);
    auto b = random_state(l, 2);
    auto back = to_momentum(to_angle(a));
    EXPECT_LT(max_abs_difference(back.amplitudes(), a.amplitudes()), 1e-12);
    cplx ov_m = overlap(a, b);
    cplx ov_a = overlap(to_angle(a), to_angle(b));
    EXPECT_LT(std::abs(ov_m - ov_a), 1e-12);
    EXPECT_NEAR(to_angle(a).norm_squared(), 1.0, 1e-12);
    EXPECT_THROW(to_momentum(a), std::logic_error);
    EXPECT_THROW(to_angle(to_angle(a)), std::logic_error);
}

TEST(Transforms, PacketAngleWidth) {
    auto l = LatticeParams::make(12, 0.5);
    auto ang = to_angle(gaussian_packet({3.0, -1.0}, l));
    double mean = 0.0;
    for (std::size_t j = 0; j < l.dim; ++j) {
        mean += std::norm(ang[j]) * l.angle_of_index(j);
    }
    double var = 0.0;
    for (std::size_t j = 0; j < l.dim; ++j) {
        double d = l.angle_of_index(j) - mean;
        var += std::norm(ang[j]) * d * d;
    }
    EXPECT_NEAR(mean, 3.0, 1e-6);
    EXPECT_NEAR(std::sqrt(2.0 * var), std::sqrt(l.hbar_eff()), 1e-3 * std::sqrt(l.hbar_eff()));
}

TEST(Fidelity, Basics) {
    auto l = LatticeParams::make(6, 0.5);
    auto a = random_state(l, 3);
    auto b = random_state(l, 4);
    EXPECT_NEAR(fidelity(a, a), 1.0, 1e-14);
    EXPECT_EQ(fidelity(a, b), fidelity(b, a));
    auto c = a;
    c.apply_global_phase(1.234);
    EXPECT_NEAR(fidelity(a, c), 1.0, 1e-14);
    auto e0 = QuantumState::basis_state(l, Basis::momentum, 0);
    auto e1 = QuantumState::basis_state(l, Basis::momentum, 1);
    EXPECT_EQ(fidelity(e0, e1), 0.0);
    EXPECT_THROW(fidelity(a, to_angle(b)), std::invalid_argument);
}

TEST(Snapshot, RoundTrip) {
    auto l = LatticeParams::make(5, -0.5);
    auto s = to_angle(gaussian_packet({1.0, 0.2}, l));
    std::stringstream ss;
    write_snapshot(ss, s);
    EXPECT_EQ(ss.str().rfind("# qsaw-state n_qubits=5 basis=angle", 0), 0u);
    auto r = read_snapshot(ss);
    EXPECT_EQ(r.basis(), Basis::angle);
    EXPECT_EQ(r.lattice().n_qubits, 5);
    EXPECT_EQ(r.lattice().K, -0.5);
    EXPECT_EQ(max_abs_difference(r.amplitudes(), s.amplitudes()), 0.0);
}

TEST(Snapshot, RejectsGarbage) {
    std::stringstream ss("not a snapshot\n");
    EXPECT_THROW(read_snapshot(ss), std::runtime_error);
}

}  // namespace
}  // namespace qsaw
