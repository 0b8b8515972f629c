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
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "qsaw/classical.hpp"
#include "qsaw/propagator.hpp"

namespace qsaw {
namespace {

constexpr double pi = std::numbers::pi;

TEST(ApplyRotation, ZeroPeriodIsIdentity) {
    auto l = LatticeParams::make(6, 0.5);
    auto s = random_state(l, 1);
    auto r = s;
    apply_rotation(r, 0.0);
    EXPECT_EQ(max_abs_difference(r.amplitudes(), s.amplitudes()), 0.0);
}

TEST(ApplyRotation, ZeroMomentumInvariant) {
    auto l = LatticeParams::make(6, 0.5);
    auto s = QuantumState::basis_state(l, Basis::momentum, l.dim / 2);
    apply_rotation(s, l.period);
    EXPECT_EQ(s[l.dim / 2], cplx(1.0, 0.0));
}

TEST(ApplyRotation, InverseAndBasisCheck) {
    auto l = LatticeParams::make(8, 0.5);
    auto s = random_state(l, 2);
    auto r = s;
    apply_rotation(r, l.period);
    apply_rotation(r, -l.period);
    EXPECT_LT(max_abs_difference(r.amplitudes(), s.amplitudes()), 1e-12);
    auto a = to_angle(s);
    EXPECT_THROW(apply_rotation(a, l.period), std::logic_error);
    EXPECT_THROW(apply_kick(s, 1.0), std::logic_error);
}

TEST(ApplyKick, Additive) {
    auto l = LatticeParams::make(8, 0.5);
    auto s = to_angle(random_state(l, 3));
    auto ab = s;
    apply_kick(ab, 0.7);
    apply_kick(ab, -2.1);
    auto sum = s;
    apply_kick(sum, 0.7 - 2.1);
    EXPECT_LT(max_abs_difference(ab.amplitudes(), sum.amplitudes()), 1e-12);

    auto m = random_state(l, 4);
    auto rr = m;
    apply_rotation(rr, 0.3);
    apply_rotation(rr, 0.5);
    auto rs = m;
    apply_rotation(rs, 0.8);
    EXPECT_LT(max_abs_difference(rr.amplitudes(), rs.amplitudes()), 1e-12);
}

TEST(StepExact, MatchesDenseMatrixOracle) {
    // U_{n m} = e^{-i T n^2 / 2} N^{-1} sum_l e^{i (m - n) theta_l} e^{i k (theta_l - pi)^2 / 2}
    auto l = LatticeParams::make(4, 0.8);
    auto s = random_state(l, 5);
    auto out = step_exact(s);
    const double N = static_cast<double>(l.dim);
    for (std::size_t i = 0; i < l.dim; ++i) {
        double n = l.momentum_of_index(i);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < l.dim; ++j) {
            double m = l.momentum_of_index(j);
            cplx u = 0.0;
            for (std::size_t q = 0; q < l.dim; ++q) {
                double th = l.angle_of_index(q);
                u += std::polar(1.0, (m - n) * th + l.kick * (th - pi) * (th - pi) / 2.0);
            }
            acc += u / N * s[j];
        }
        acc *= std::polar(1.0, -l.period * n * n / 2.0);
        EXPECT_LT(std::abs(acc - out[i]), 1e-12) << i;
    }
}

TEST(StepExact, UnitaryOverManySteps) {
    auto l = LatticeParams::make(10, 0.5);
    auto s = gaussian_packet({1.0, 0.0}, l);
    auto r = evolve(s, StepPerturbation::from_deltaK(1e-3, l, 3), 10000);
    EXPECT_NEAR(r.final_state.norm_squared(), 1.0, 1e-9);
}

TEST(StepExact, TimeReversal) {
    auto l = LatticeParams::make(10, 0.5);
    auto s = gaussian_packet({1.0, 0.0}, l);
    auto r = s;
    for (int t = 0; t < 500; ++t) {
        step_exact_in_place(r, 0.01 * t);
    }
    for (int t = 499; t >= 0; --t) {
        step_exact_inverse_in_place(r, 0.01 * t);
    }
    EXPECT_GT(fidelity(r, s), 1.0 - 1e-10);
}

TEST(StepExact, PacketFollowsClassicalMap) {
    auto l = LatticeParams::make(12, 0.5);
    PhasePoint x{2.0, 0.5};
    auto s = gaussian_packet({x.theta, x.p}, l);
    const double sigma_cells = std::sqrt(static_cast<double>(l.dim) / two_pi);
    for (int t = 0; t < 3; ++t) {
        step_exact_in_place(s);
        x = step_classical(x, 0.5);
        auto m = moments(s);
        double dp_cells = std::abs(std::remainder(m.p_mean - x.p, two_pi)) / l.period;
        double dth_cells = std::abs(std::remainder(m.theta_mean - x.theta, two_pi)) / l.period;
        EXPECT_LT(dp_cells, 3.0 * sigma_cells) << t;
        EXPECT_LT(dth_cells, 3.0 * sigma_cells) << t;
    }
}

TEST(StepExact, IslandOscillationPeriod) {
    auto l = LatticeParams::make(12, -0.5);
    auto s = gaussian_packet({1.0, 0.0}, l);
    std::vector<double> p{moments(s).p_mean};
    for (int t = 0; t < 200; ++t) {
        step_exact_in_place(s);
        p.push_back(moments(s).p_mean);
    }
    // upward zero crossings of <p>
    std::vector<double> crossings;
    for (std::size_t t = 1; t < p.size(); ++t) {
        if (p[t - 1] < 0.0 && p[t] >= 0.0) {
            crossings.push_back(static_cast<double>(t - 1) + p[t - 1] / (p[t - 1] - p[t]));
        }
    }
    ASSERT_GE(crossings.size(), 10u);
    double period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    EXPECT_NEAR(period, 2.0 * pi / std::sqrt(0.5), 0.05 * 2.0 * pi / std::sqrt(0.5));
}

TEST(Evolve, ZeroStepsAndZeroAmplitude) {
    auto l = LatticeParams::make(8, 0.5);
    auto s = gaussian_packet({1.0, 0.0}, l);
    auto r0 = evolve(s, std::nullopt, 0);
    EXPECT_EQ(max_abs_difference(r0.final_state.amplitudes(), s.amplitudes()), 0.0);

    auto a = evolve(s, StepPerturbation::from_deltaK(0.0, l, 5), 50);
    auto b = evolve(s, std::nullopt, 50);
    EXPECT_EQ(max_abs_difference(a.final_state.amplitudes(), b.final_state.amplitudes()), 0.0);
    EXPECT_EQ(a.delta_k.size(), 50u);
}

TEST(Evolve, CompositionBitForBit) {
    auto l = LatticeParams::make(8, 0.5);
    auto s = gaussian_packet({1.0, 0.0}, l);
    auto pert = StepPerturbation::from_deltaK(1e-2, l, 17);
    auto r = evolve(s, pert, 40, true);
    ASSERT_EQ(r.history.size(), 41u);
    auto noise = pert.stream();
    auto x = s;
    for (int t = 0; t < 40; ++t) {
        double dk = noise.next();
        EXPECT_EQ(dk, r.delta_k[static_cast<std::size_t>(t)]);
        x = step_exact(x, dk);
    }
    EXPECT_EQ(max_abs_difference(x.amplitudes(), r.final_state.amplitudes()), 0.0);
    for (double dk : r.delta_k) {
        EXPECT_LE(std::abs(dk), 1e-2 / l.period);
    }
}

TEST(Evolve, LogFormat) {
    std::ostringstream os;
    write_evolution_log(os, {0.5, -0.25});
    EXPECT_EQ(os.str(), "step,delta_k_drawn\n1,0.5\n2,-0.25\n");
}

TEST(Evolve, StaticKickShiftGivesGaussianIslandDecay) {
    // constant delta_K inside the island: ballistic packet separation
    auto l = LatticeParams::make(10, -0.5);
    auto s = gaussian_packet({1.0, 0.0}, l);
    auto a = s;
    auto b = s;
    const double dk = 4e-3 / l.period;
    std::vector<double> f{1.0};
    for (int t = 0; t < 3000 && f.back() > 0.05; ++t) {
        step_exact_in_place(a);
        step_exact_in_place(b, dk);
        f.push_back(fidelity(a, b));
    }
    EXPECT_LT(f.back(), 0.1);
}

}  // namespace
}  // namespace qsaw
