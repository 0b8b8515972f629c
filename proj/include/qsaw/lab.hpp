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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qsaw/circuit.hpp"
#include "qsaw/classical.hpp"
#include "qsaw/fit.hpp"
#include "qsaw/lattice.hpp"
#include "qsaw/propagator.hpp"
#include "qsaw/random.hpp"
#include "qsaw/state.hpp"

namespace qsaw {

enum class ChannelKind {
    quantum,    // noisy gates on the perturbed branch
    classical,  // per-step kick fluctuation delta_K(t) on the perturbed branch
};

struct ErrorChannel {
    ChannelKind kind = ChannelKind::quantum;
    double epsilon = 0.0;  // quantum: max dephasing amplitude
    NoiseRegime regime = NoiseRegime::memoryless;
    double deltaK = 0.0;  // classical: max |delta_K(t)|, rescaled units

    static ErrorChannel quantum(double epsilon, NoiseRegime regime = NoiseRegime::memoryless) {
        return {ChannelKind::quantum, epsilon, regime, 0.0};
    }
    static ErrorChannel classical(double deltaK) {
        return {ChannelKind::classical, 0.0, NoiseRegime::memoryless, deltaK};
    }

    bool null() const {
        return kind == ChannelKind::quantum ? epsilon == 0.0 : deltaK == 0.0;
    }
};

enum class InitialKind {
    gaussian,          // packet at (theta0, p0)
    gaussian_uniform,  // packet centers drawn uniformly over the torus
    random,            // random-phase state
};

inline const char *to_string(InitialKind k) {
    switch (k) {
        case InitialKind::gaussian:
            return "gaussian";
        case InitialKind::gaussian_uniform:
            return "gaussian-uniform";
        case InitialKind::random:
            return "random";
    }
    return "?";
}

inline InitialKind parse_initial_kind(const std::string &s) {
    if (s == "gaussian") {
        return InitialKind::gaussian;
    }
    if (s == "gaussian-uniform") {
        return InitialKind::gaussian_uniform;
    }
    if (s == "random") {
        return InitialKind::random;
    }
    throw std::invalid_argument("unknown initial state kind: " + s);
}

struct InitialSpec {
    InitialKind kind = InitialKind::gaussian;
    double theta0 = 1.0;
    double p0 = 0.0;
};

struct ExperimentConfig {
    LatticeParams lattice;
    ErrorChannel channel;
    InitialSpec initial;
    int t_max = 100;
    int n_initial = 1;  // initial states
    int n_noise = 1;    // noise realizations per initial state
    std::uint64_t master_seed = 1;
    // Stop early once the ensemble mean falls below this value (0 disables).
    double stop_below = 0.0;
    int jobs = 1;
    bool keep_members = true;

    std::size_t ensemble_size() const {
        return static_cast<std::size_t>(n_initial) * static_cast<std::size_t>(n_noise);
    }

    void validate() const {
        if (t_max < 1) {
            throw std::invalid_argument("t_max must be at least 1");
        }
        if (n_initial < 1 || n_noise < 1) {
            throw std::invalid_argument("ensemble sizes must be at least 1");
        }
        if (channel.epsilon < 0.0 || channel.deltaK < 0.0 || !std::isfinite(channel.epsilon) ||
            !std::isfinite(channel.deltaK)) {
            throw std::invalid_argument("error amplitudes must be finite and non-negative");
        }
        if (jobs < 1) {
            throw std::invalid_argument("jobs must be at least 1");
        }
    }
};

/// Initial state of ensemble member (initial_index, *).
inline QuantumState make_initial_state(const ExperimentConfig &cfg, std::size_t initial_index) {
    switch (cfg.initial.kind) {
        case InitialKind::gaussian:
            return gaussian_packet({cfg.initial.theta0, cfg.initial.p0}, cfg.lattice);
        case InitialKind::gaussian_uniform: {
            auto gen = derive_stream(cfg.master_seed, StreamTag::packet_center, {initial_index});
            std::uniform_real_distribution<double> u(0.0, two_pi);
            double theta0 = u(gen);
            double p0 = u(gen) - std::numbers::pi;
            return gaussian_packet({theta0, p0}, cfg.lattice);
        }
        case InitialKind::random:
            return random_state(cfg.lattice, derive_seed(cfg.master_seed, StreamTag::initial_state, {initial_index}));
    }
    throw std::logic_error("unreachable");
}

/// Seed of the noise realization used by ensemble member (initial_index, noise_index).
inline std::uint64_t member_noise_seed(const ExperimentConfig &cfg, std::size_t initial_index,
                                       std::size_t noise_index) {
    StreamTag tag = cfg.channel.kind == ChannelKind::quantum ? StreamTag::gate_noise : StreamTag::quantum_kick;
    return derive_seed(cfg.master_seed, tag, {initial_index, noise_index});
}

/// Runs f(i) for i in [0, n) over `jobs` threads with static chunking.
template <typename F>
void parallel_for(std::size_t n, int jobs, F &&f) {
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            f(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                f(i);
            }
        });
    }
}

/// Perturbed one-step evolution of one ensemble member: either the noisy
/// circuit or the exact step with a fluctuating kick.
class PerturbedStepper {
  public:
    PerturbedStepper(const ExperimentConfig &cfg, std::size_t member, const CircuitProgram &program) {
        std::size_t i = member / static_cast<std::size_t>(cfg.n_noise);
        std::size_t r = member % static_cast<std::size_t>(cfg.n_noise);
        std::uint64_t seed = member_noise_seed(cfg, i, r);
        if (cfg.channel.kind == ChannelKind::quantum) {
            circuit_.emplace(program, NoiseModel{cfg.channel.epsilon, cfg.channel.regime, seed});
        } else {
            kick_noise_.emplace(StepPerturbation::from_deltaK(cfg.channel.deltaK, cfg.lattice, seed).stream());
        }
    }

    /// Applies step t (1-based). Classical-channel draws are sequential, so
    /// steps must be taken in order.
    void step(QuantumState &state, std::uint64_t t) {
        if (circuit_) {
            circuit_->run_step(state, t);
        } else {
            step_exact_in_place(state, kick_noise_->next());
        }
    }

  private:
    std::optional<NoisyCircuit> circuit_;
    std::optional<UniformStepNoise> kick_noise_;
};

/// Ideal and perturbed branches of one ensemble member, advanced in lockstep.
class MemberRun {
  public:
    MemberRun(const ExperimentConfig &cfg, std::size_t member, const CircuitProgram &program)
        : ideal_(make_initial_state(cfg, member / static_cast<std::size_t>(cfg.n_noise))),
          perturbed_(ideal_),
          stepper_(cfg, member, program) {
    }

    /// Advances both branches by step t (1-based) and returns f(t).
    double advance(std::uint64_t t) {
        step_exact_in_place(ideal_);
        stepper_.step(perturbed_, t);
        return fidelity(ideal_, perturbed_);
    }

    const QuantumState &ideal() const {
        return ideal_;
    }
    const QuantumState &perturbed() const {
        return perturbed_;
    }

  private:
    QuantumState ideal_;
    QuantumState perturbed_;
    PerturbedStepper stepper_;
};

/// Ensemble-averaged fidelity between ideal and perturbed evolutions of the
/// same initial state. The ideal branch always uses the exact propagator.
inline FidelityCurve fidelity_curve(const ExperimentConfig &cfg) {
    cfg.validate();
    const std::size_t members = cfg.ensemble_size();
    CircuitProgram program;
    if (cfg.channel.kind == ChannelKind::quantum) {
        program = build_sawtooth_circuit(cfg.lattice);
    }
    std::vector<MemberRun> runs;
    runs.reserve(members);
    for (std::size_t m = 0; m < members; ++m) {
        runs.emplace_back(cfg, m, program);
    }
    std::vector<std::vector<double>> rows(members, std::vector<double>{1.0});
    for (auto &row : rows) {
        row.reserve(static_cast<std::size_t>(cfg.t_max) + 1);
    }

    constexpr int block = 16;
    int done = 0;
    while (done < cfg.t_max) {
        int end = std::min(cfg.t_max, done + block);
        parallel_for(members, cfg.jobs, [&](std::size_t m) {
            for (int t = done + 1; t <= end; ++t) {
                rows[m].push_back(runs[m].advance(static_cast<std::uint64_t>(t)));
            }
        });
        if (cfg.stop_below > 0.0) {
            std::optional<int> stop;
            for (int t = done + 1; t <= end && !stop; ++t) {
                double mean = 0.0;
                for (const auto &row : rows) {
                    mean += row[static_cast<std::size_t>(t)];
                }
                if (mean / static_cast<double>(members) < cfg.stop_below) {
                    stop = t;
                }
            }
            if (stop) {
                for (auto &row : rows) {
                    row.resize(static_cast<std::size_t>(*stop) + 1);
                }
                break;
            }
        }
        done = end;
    }
    return average_curves(std::move(rows), cfg.keep_members);
}

struct ScatteringResult {
    double sigma_z = 0.0;  // Re Tr(W rho)
    double sigma_y = 0.0;  // Im Tr(W rho)
    double fidelity = 0.0;
    int shots = 0;  // 0 for the analytic expectation
    double sampled_sigma_z = 0.0;
    double sampled_sigma_y = 0.0;
    double sampled_fidelity = 0.0;
};

namespace detail {

// Ancilla H, controlled-W, optional S^dagger, ancilla H on an (n_q + 1)-qubit
// register with the ancilla as the top qubit; returns <sigma_z> of the ancilla.
template <typename ApplyW>
double ancilla_polarization(const QuantumState &psi0, ApplyW &&apply_w, bool measure_y) {
    const std::size_t dim = psi0.size();
    const int anc = psi0.lattice().n_qubits;
    std::vector<cplx> reg(2 * dim);
    std::copy(psi0.amplitudes().begin(), psi0.amplitudes().end(), reg.begin());
    std::span<cplx> all(reg);
    apply_gate(all, Gate::hadamard(anc));

    std::vector<cplx> upper(reg.begin() + static_cast<std::ptrdiff_t>(dim), reg.end());
    QuantumState block(psi0.lattice(), Basis::momentum, std::move(upper));
    apply_w(block);
    std::copy(block.amplitudes().begin(), block.amplitudes().end(), reg.begin() + static_cast<std::ptrdiff_t>(dim));

    if (measure_y) {
        apply_gate(all, Gate::phase(anc, -std::numbers::pi / 2.0));
    }
    apply_gate(all, Gate::hadamard(anc));
    double p0 = 0.0;
    double p1 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        p0 += std::norm(reg[i]);
        p1 += std::norm(reg[dim + i]);
    }
    return p0 - p1;
}

}  // namespace detail

/// Fidelity at step t from the ancilla polarizations of the scattering
/// circuit with W = (U^t)^dagger U_eps^t and rho = |psi0><psi0| of ensemble
/// member `member`, using that member's noise draws. With shots > 0 the
/// polarizations are also estimated from binomial measurement samples.
inline ScatteringResult scattering_fidelity(const ExperimentConfig &cfg, int t, std::size_t member = 0,
                                            int shots = 0) {
    cfg.validate();
    if (t < 0) {
        throw std::invalid_argument("scattering_fidelity: t must be non-negative");
    }
    if (member >= cfg.ensemble_size()) {
        throw std::out_of_range("scattering_fidelity: member index out of range");
    }
    CircuitProgram program;
    if (cfg.channel.kind == ChannelKind::quantum) {
        program = build_sawtooth_circuit(cfg.lattice);
    }
    const QuantumState psi0 = make_initial_state(cfg, member / static_cast<std::size_t>(cfg.n_noise));
    auto apply_w = [&](QuantumState &state) {
        PerturbedStepper stepper(cfg, member, program);
        for (int s = 1; s <= t; ++s) {
            stepper.step(state, static_cast<std::uint64_t>(s));
        }
        for (int s = 0; s < t; ++s) {
            step_exact_inverse_in_place(state);
        }
    };

    ScatteringResult res;
    res.sigma_z = detail::ancilla_polarization(psi0, apply_w, false);
    res.sigma_y = detail::ancilla_polarization(psi0, apply_w, true);
    res.fidelity = res.sigma_z * res.sigma_z + res.sigma_y * res.sigma_y;
    if (shots > 0) {
        res.shots = shots;
        auto sample = [&](double sigma, std::uint64_t which) {
            auto gen = derive_stream(cfg.master_seed, StreamTag::shots,
                                     {member, static_cast<std::uint64_t>(t), which});
            double p_zero = std::clamp(0.5 * (1.0 + sigma), 0.0, 1.0);
            std::binomial_distribution<int> dist(shots, p_zero);
            return 2.0 * dist(gen) / shots - 1.0;
        };
        res.sampled_sigma_z = sample(res.sigma_z, 0);
        res.sampled_sigma_y = sample(res.sigma_y, 1);
        res.sampled_fidelity =
            res.sampled_sigma_z * res.sampled_sigma_z + res.sampled_sigma_y * res.sampled_sigma_y;
    }
    return res;
}

/// Rough decay rate C eps^2 n_g of memoryless gate noise, with C = 1/4, used
/// only to size step budgets.
inline double expected_gate_noise_rate(int n_qubits, double epsilon) {
    return 0.25 * epsilon * epsilon * (3.0 * n_qubits * n_qubits + n_qubits);
}

struct TfSweepOptions {
    double K = 5.0;
    int n_noise = 50;
    InitialSpec initial{};
    std::uint64_t master_seed = 1;
    double level = 0.9;
    int jobs = 1;
};

/// t_f for every (n_q, epsilon) grid point, each with a fresh noise ensemble.
inline std::vector<TfRecord> sweep_tf(const std::vector<int> &n_qubits_list, const std::vector<double> &epsilons,
                                      const TfSweepOptions &opt) {
    std::vector<TfRecord> out;
    for (int nq : n_qubits_list) {
        for (double eps : epsilons) {
            ExperimentConfig cfg;
            cfg.lattice = LatticeParams::make(nq, opt.K);
            cfg.channel = ErrorChannel::quantum(eps);
            cfg.initial = opt.initial;
            cfg.n_initial = 1;
            cfg.n_noise = opt.n_noise;
            cfg.master_seed = derive_seed(opt.master_seed, StreamTag::gate_noise,
                                          {static_cast<std::uint64_t>(nq), std::bit_cast<std::uint64_t>(eps)});
            double expect = -std::log(opt.level) / expected_gate_noise_rate(nq, eps);
            cfg.t_max = std::max(8, static_cast<int>(std::ceil(6.0 * expect)) + 4);
            cfg.stop_below = opt.level - 0.05;
            cfg.jobs = opt.jobs;
            cfg.keep_members = false;
            out.push_back(estimate_tf(fidelity_curve(cfg), nq, eps, opt.level));
        }
    }
    return out;
}

struct RateRecord {
    double K = 0.0;
    InitialSpec initial;
    DecayFit fit;
    double rate_stderr = 0.0;  // jackknife over ensemble members
    double lyapunov = 0.0;
    int t_max = 0;
};

struct RateSweepOptions {
    int n_qubits = 9;
    double epsilon = 1e-2;
    NoiseRegime regime = NoiseRegime::memoryless;
    int n_initial = 1;
    int n_noise = 25;
    std::uint64_t master_seed = 1;
    FitWindow window{};
    int jobs = 1;
};

/// Fitted exponential gate-noise decay rate for every (K, initial state) pair.
inline std::vector<RateRecord> sweep_rate_vs_K(const std::vector<double> &Ks,
                                               const std::vector<InitialSpec> &initials,
                                               const RateSweepOptions &opt) {
    std::vector<RateRecord> out;
    for (double K : Ks) {
        for (const InitialSpec &init : initials) {
            ExperimentConfig cfg;
            cfg.lattice = LatticeParams::make(opt.n_qubits, K);
            cfg.channel = ErrorChannel::quantum(opt.epsilon, opt.regime);
            cfg.initial = init;
            cfg.n_initial = opt.n_initial;
            cfg.n_noise = opt.n_noise;
            cfg.master_seed = opt.master_seed;
            double expect = -std::log(opt.window.lo) / expected_gate_noise_rate(opt.n_qubits, opt.epsilon);
            cfg.t_max = static_cast<int>(std::ceil(4.0 * expect));
            cfg.stop_below = 0.8 * opt.window.lo;
            cfg.jobs = opt.jobs;
            FidelityCurve curve = fidelity_curve(cfg);
            RateRecord rec;
            rec.K = K;
            rec.initial = init;
            rec.fit = fit_decay(curve, DecayModel::exponential, opt.window);
            rec.rate_stderr = curve.members.size() > 1
                                  ? jackknife_rate_stderr(curve, DecayModel::exponential, opt.window)
                                  : rec.fit.rate_stderr;
            rec.lyapunov = lyapunov_exponent({K});
            rec.t_max = curve.t_max();
            out.push_back(rec);
        }
    }
    return out;
}

enum class DecayRegime {
    none,              // no perturbation, no decay
    fermi_golden_rule, // chaotic, rate below the Lyapunov exponent
    lyapunov,          // chaotic, rate within tolerance of the Lyapunov exponent
    gaussian,          // stable regime, Gaussian profile preferred
    exponential,       // stable regime, exponential profile preferred
};

inline const char *to_string(DecayRegime r) {
    switch (r) {
        case DecayRegime::none:
            return "none";
        case DecayRegime::fermi_golden_rule:
            return "fgr";
        case DecayRegime::lyapunov:
            return "lyapunov";
        case DecayRegime::gaussian:
            return "gaussian";
        case DecayRegime::exponential:
            return "exponential";
    }
    return "?";
}

struct ClassicalRegimeRecord {
    double deltaK = 0.0;
    double delta_k = 0.0;  // in k units; "quantally strong" when > 1
    DecayRegime regime = DecayRegime::none;
    std::optional<DecayFit> fit;
    std::optional<DecayFit> alternative;  // the other model, stable regime only
    double rate_stderr = 0.0;
    double lyapunov = 0.0;
    int t_max = 0;
};

struct ClassicalRegimeOptions {
    int n_qubits = 12;
    InitialSpec initial{InitialKind::gaussian_uniform, 1.0, 0.0};
    int n_initial = 50;
    int n_noise = 1;
    int t_max = 2000;
    std::uint64_t master_seed = 1;
    FitWindow window{};
    double lyapunov_tolerance = 0.25;
    int jobs = 1;
};

/// Fits each classical-error curve and labels the decay regime: in the
/// chaotic regime the fitted exponential rate is compared with lambda(K);
/// in the stable regime the better of the two models is reported.
inline std::vector<ClassicalRegimeRecord> classical_error_regimes(double K, const std::vector<double> &deltaKs,
                                                                  const ClassicalRegimeOptions &opt) {
    std::vector<ClassicalRegimeRecord> out;
    const double lambda = lyapunov_exponent({K});
    for (double dK : deltaKs) {
        ExperimentConfig cfg;
        cfg.lattice = LatticeParams::make(opt.n_qubits, K);
        cfg.channel = ErrorChannel::classical(dK);
        cfg.initial = opt.initial;
        cfg.n_initial = opt.n_initial;
        cfg.n_noise = opt.n_noise;
        cfg.master_seed = opt.master_seed;
        cfg.t_max = opt.t_max;
        cfg.stop_below = 0.8 * opt.window.lo;
        cfg.jobs = opt.jobs;
        ClassicalRegimeRecord rec;
        rec.deltaK = dK;
        rec.delta_k = dK / cfg.lattice.period;
        rec.lyapunov = lambda;
        if (dK == 0.0) {
            rec.regime = DecayRegime::none;
            out.push_back(rec);
            continue;
        }
        FidelityCurve curve = fidelity_curve(cfg);
        rec.t_max = curve.t_max();
        if (lambda > 0.0) {
            rec.fit = fit_decay(curve, DecayModel::exponential, opt.window);
            rec.regime = std::abs(rec.fit->rate - lambda) <= opt.lyapunov_tolerance * lambda
                             ? DecayRegime::lyapunov
                             : DecayRegime::fermi_golden_rule;
            rec.rate_stderr = curve.members.size() > 1
                                  ? jackknife_rate_stderr(curve, DecayModel::exponential, opt.window)
                                  : rec.fit->rate_stderr;
        } else {
            DecayFit g = fit_decay(curve, DecayModel::gaussian, opt.window);
            DecayFit e = fit_decay(curve, DecayModel::exponential, opt.window);
            bool gauss = g.r_squared >= e.r_squared;
            rec.fit = gauss ? g : e;
            rec.alternative = gauss ? e : g;
            rec.regime = gauss ? DecayRegime::gaussian : DecayRegime::exponential;
            rec.rate_stderr = curve.members.size() > 1 ? jackknife_rate_stderr(curve, rec.fit->model, opt.window)
                                                       : rec.fit->rate_stderr;
        }
        out.push_back(rec);
    }
    return out;
}

}  // namespace qsaw
