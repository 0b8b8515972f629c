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
#include <vector>

#include <gtest/gtest.h>

#include "qsaw/lab.hpp"

namespace qsaw {
namespace {

ExperimentConfig small_quantum(double eps) {
    ExperimentConfig c;
    c.lattice = LatticeParams::make(6, 0.5);
    c.channel = ErrorChannel::quantum(eps);
    c.initial = {InitialKind::gaussian, 1.0, 0.0};
    c.t_max = 40;
    c.n_initial = 2;
    c.n_noise = 3;
    c.master_seed = 11;
    return c;
}

TEST(FidelityCurve, StartsAtOneAndIsDeterministic) {
    for (auto kind : {InitialKind::gaussian, InitialKind::gaussian_uniform, InitialKind::random}) {
        auto cfg = small_quantum(3e-2);
        cfg.initial.kind = kind;
        auto a = fidelity_curve(cfg);
        cfg.jobs = 3;
        auto b = fidelity_curve(cfg);
        ASSERT_EQ(a.f.size(), 41u);
        EXPECT_EQ(a.f[0], 1.0);
        EXPECT_EQ(a.f, b.f);
        EXPECT_EQ(a.f_err, b.f_err);
        EXPECT_LT(a.f.back(), 0.999);
    }
}

TEST(FidelityCurve, SeedChangesCurve) {
    auto cfg = small_quantum(3e-2);
    auto a = fidelity_curve(cfg);
    cfg.master_seed = 12;
    EXPECT_NE(a.f, fidelity_curve(cfg).f);
}

TEST(FidelityCurve, NullChannelsStayAtOne) {
    auto q = small_quantum(0.0);
    q.t_max = 1000;
    q.n_initial = 1;
    q.n_noise = 1;
    auto cq = fidelity_curve(q);
    for (double f : cq.f) {
        ASSERT_NEAR(f, 1.0, 1e-12);
    }
    auto c = q;
    c.channel = ErrorChannel::classical(0.0);
    auto cc = fidelity_curve(c);
    for (double f : cc.f) {
        ASSERT_NEAR(f, 1.0, 1e-12);
    }
}

TEST(FidelityCurve, StopBelowTruncates) {
    auto cfg = small_quantum(0.2);
    cfg.t_max = 400;
    cfg.stop_below = 0.5;
    auto c = fidelity_curve(cfg);
    EXPECT_LT(c.f.back(), 0.5);
    EXPECT_GE(c.f[c.f.size() - 2], 0.5);
}

TEST(FidelityCurve, InvalidConfigRejected) {
    auto cfg = small_quantum(1e-2);
    cfg.t_max = 0;
    EXPECT_THROW(fidelity_curve(cfg), std::invalid_argument);
    cfg = small_quantum(-1e-2);
    EXPECT_THROW(fidelity_curve(cfg), std::invalid_argument);
}

TEST(FidelityCurve, EnsembleErrorShrinksAsRootN) {
    auto cfg = small_quantum(5e-2);
    cfg.initial.kind = InitialKind::random;
    cfg.t_max = 30;
    cfg.n_initial = 1;
    cfg.n_noise = 16;
    auto small = fidelity_curve(cfg);
    cfg.n_noise = 256;
    auto big = fidelity_curve(cfg);
    double ratio = small.f_err[30] / big.f_err[30];
    EXPECT_GT(ratio, 4.0 / 1.5);
    EXPECT_LT(ratio, 4.0 * 1.5);
}

TEST(InitialStates, UniformCentersDiffer) {
    auto cfg = small_quantum(0.0);
    cfg.initial.kind = InitialKind::gaussian_uniform;
    auto a = make_initial_state(cfg, 0);
    auto b = make_initial_state(cfg, 1);
    EXPECT_LT(fidelity(a, b), 0.99);
    EXPECT_EQ(make_initial_state(cfg, 1).amplitudes()[3], b.amplitudes()[3]);
    EXPECT_NEAR(a.norm_squared(), 1.0, 1e-12);
}

TEST(Scattering, AnalyticEqualsDirectOverlap) {
    for (auto kind : {ChannelKind::quantum, ChannelKind::classical}) {
        auto cfg = small_quantum(5e-2);
        if (kind == ChannelKind::classical) {
            cfg.channel = ErrorChannel::classical(2e-2);
        }
        cfg.t_max = 12;
        auto curve = fidelity_curve(cfg);
        for (std::size_t m = 0; m < cfg.ensemble_size(); ++m) {
            for (int t : {0, 1, 5, 12}) {
                auto r = scattering_fidelity(cfg, t, m);
                ASSERT_NEAR(r.fidelity, curve.members[m][static_cast<std::size_t>(t)], 1e-12);
            }
        }
    }
}

TEST(Scattering, TimeZeroIsOne) {
    auto r = scattering_fidelity(small_quantum(5e-2), 0);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-14);
    EXPECT_NEAR(r.sigma_z, 1.0, 1e-14);
    EXPECT_NEAR(r.sigma_y, 0.0, 1e-14);
}

TEST(Scattering, SampledWithinBinomialError) {
    auto cfg = small_quantum(5e-2);
    const int shots = 10000;
    for (int t : {3, 10, 25}) {
        auto r = scattering_fidelity(cfg, t, 0, shots);
        double ez = std::sqrt((1.0 - r.sigma_z * r.sigma_z) / shots);
        double ey = std::sqrt((1.0 - r.sigma_y * r.sigma_y) / shots);
        EXPECT_LE(std::abs(r.sampled_sigma_z - r.sigma_z), 3.0 * ez + 1e-12);
        EXPECT_LE(std::abs(r.sampled_sigma_y - r.sigma_y), 3.0 * ey + 1e-12);
        EXPECT_EQ(r.shots, shots);
    }
    EXPECT_THROW(scattering_fidelity(cfg, -1), std::invalid_argument);
    EXPECT_THROW(scattering_fidelity(cfg, 1, 99), std::out_of_range);
}

TEST(ClassicalChannel, IslandStaticKickShiftIsGaussian) {
    // A constant kick shift separates the two packets ballistically.
    auto l = LatticeParams::make(12, -0.5);
    auto a = gaussian_packet({1.0, 0.0}, l);
    auto b = a;
    const double dk = 4e-3 / l.period;
    std::vector<double> f{1.0};
    while (f.back() > 0.05 && f.size() < 4000) {
        step_exact_in_place(a);
        step_exact_in_place(b, dk);
        f.push_back(fidelity(a, b));
    }
    auto g = fit_decay(f, DecayModel::gaussian);
    auto e = fit_decay(f, DecayModel::exponential);
    EXPECT_GT(g.r_squared, 0.95);
    EXPECT_GT(g.r_squared, e.r_squared);
}

TEST(ClassicalChannel, ChaoticDecayIsExponential) {
    ExperimentConfig cfg;
    cfg.lattice = LatticeParams::make(10, 0.5);
    cfg.channel = ErrorChannel::classical(1e-3);
    cfg.initial = {InitialKind::gaussian, 1.0, 0.0};
    cfg.t_max = 600;
    cfg.n_noise = 4;
    cfg.stop_below = 0.08;
    auto fit = fit_decay(fidelity_curve(cfg), DecayModel::exponential);
    EXPECT_GT(fit.r_squared, 0.98);
}

TEST(Sweeps, RateAndTfShapes) {
    TfSweepOptions topt;
    topt.n_noise = 4;
    auto tf = sweep_tf({4, 5}, {5e-2, 1e-1}, topt);
    ASSERT_EQ(tf.size(), 4u);
    EXPECT_GT(tf[0].t_f, tf[1].t_f);
    EXPECT_GT(tf[0].t_f, tf[2].t_f);

    RateSweepOptions ropt;
    ropt.n_qubits = 5;
    ropt.epsilon = 5e-2;
    ropt.n_noise = 4;
    auto rates = sweep_rate_vs_K({0.5, -0.5}, {{InitialKind::random, 0, 0}}, ropt);
    ASSERT_EQ(rates.size(), 2u);
    for (const auto &r : rates) {
        EXPECT_GT(r.fit.rate, 0.0);
    }
    EXPECT_GT(rates[0].lyapunov, 0.0);
    EXPECT_EQ(rates[1].lyapunov, 0.0);
}

TEST(Sweeps, ClassicalRegimeNullPerturbation) {
    ClassicalRegimeOptions opt;
    opt.n_qubits = 6;
    opt.n_initial = 2;
    auto recs = classical_error_regimes(0.1, {0.0}, opt);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].regime, DecayRegime::none);
    EXPECT_FALSE(recs[0].fit.has_value());
}

}  // namespace
}  // namespace qsaw
