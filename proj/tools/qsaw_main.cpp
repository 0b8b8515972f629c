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


// qsaw command-line front end: classical sections, Lyapunov exponents,
// fidelity curves and sweeps, circuit checks and the scattering circuit.

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsaw.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace qsaw;

class RuntimeFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Output sink: the --out file, or stdout when no path is given.
class Sink {
  public:
    explicit Sink(const std::string &path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) {
                throw RuntimeFailure("cannot open output file " + path);
            }
        }
    }
    std::ostream &out() {
        return file_ ? *file_ : std::cout;
    }
    void finish() {
        out().flush();
        if (!out()) {
            throw RuntimeFailure("error writing output");
        }
    }

  private:
    std::unique_ptr<std::ofstream> file_;
};

void write_csv_header(std::ostream &os, const std::string &command, const RunConfig &cfg) {
    os << "# qsaw " << command << '\n';
    if (!cfg.no_timestamp) {
        os << "# generated " << utc_timestamp() << '\n';
    }
    for (const auto &[k, v] : config_entries(cfg)) {
        os << "# " << k << '=' << v << '\n';
    }
}

json config_json(const std::string &command, const RunConfig &cfg) {
    json j;
    j["command"] = command;
    if (!cfg.no_timestamp) {
        j["generated"] = utc_timestamp();
    }
    json c = json::object();
    for (const auto &[k, v] : config_entries(cfg)) {
        c[k] = v;
    }
    j["config"] = c;
    j["master_seed"] = cfg.seed;
    return j;
}

json fit_json(const DecayFit &f) {
    return {{"model", to_string(f.model)},
            {"rate", f.rate},
            {"rate_stderr", f.rate_stderr},
            {"intercept", f.intercept},
            {"r2", f.r_squared},
            {"points", f.points},
            {"first_t", f.first_t},
            {"last_t", f.last_t},
            {"window", {f.window.lo, f.window.hi}}};
}

std::ostream &prec(std::ostream &os) {
    os.precision(17);
    return os;
}

int run_poincare(const RunConfig &cfg) {
    auto seeds = default_section_seeds();
    auto orbits = poincare_section(seeds, {cfg.K}, cfg.t_max);
    Sink sink(cfg.out);
    if (cfg.format == "json") {
        json j = config_json("poincare", cfg);
        json arr = json::array();
        for (std::size_t s = 0; s < orbits.size(); ++s) {
            json pts = json::array();
            for (const auto &x : orbits[s]) {
                pts.push_back({x.theta, x.p});
            }
            arr.push_back({{"seed_index", s}, {"points", pts}});
        }
        j["orbits"] = arr;
        sink.out() << j.dump(1) << '\n';
    } else {
        write_csv_header(sink.out(), "poincare", cfg);
        write_orbits_csv(sink.out(), orbits);
    }
    sink.finish();
    return 0;
}

int run_lyapunov(const RunConfig &cfg) {
    std::vector<double> Ks = cfg.K_list.empty() ? std::vector<double>{cfg.K} : cfg.K_list;
    const int steps = std::max(cfg.t_max, 1);
    Sink sink(cfg.out);
    json rows = json::array();
    std::ostringstream csv;
    prec(csv) << "K,lambda,lambda_numerical,steps\n";
    for (double K : Ks) {
        double closed = lyapunov_exponent({K});
        double num = lyapunov_numerical({cfg.theta0, cfg.p0}, {K}, steps);
        csv << K << ',' << closed << ',' << num << ',' << steps << '\n';
        rows.push_back({{"K", K}, {"lambda", closed}, {"lambda_numerical", num}, {"steps", steps}});
    }
    if (cfg.format == "json") {
        json j = config_json("lyapunov", cfg);
        j["rows"] = rows;
        sink.out() << j.dump(1) << '\n';
    } else {
        write_csv_header(sink.out(), "lyapunov", cfg);
        sink.out() << csv.str();
    }
    sink.finish();
    return 0;
}

int run_fidelity(const RunConfig &cfg) {
    ExperimentConfig exp = to_experiment(cfg);
    FidelityCurve curve = fidelity_curve(exp);

    json summary = config_json("fidelity", cfg);
    summary["channel"] = exp.channel.kind == ChannelKind::quantum ? "quantum" : "classical";
    summary["n_g"] = 3 * cfg.n_qubits * cfg.n_qubits + cfg.n_qubits;
    summary["lambda"] = lyapunov_exponent({cfg.K});
    summary["ensemble_size"] = exp.ensemble_size();
    std::optional<DecayFit> best;
    json fits = json::array();
    for (DecayModel m : {DecayModel::exponential, DecayModel::gaussian}) {
        try {
            DecayFit f = fit_decay(curve, m);
            fits.push_back(fit_json(f));
            if (!best || f.r_squared > best->r_squared) {
                best = f;
            }
        } catch (const FitError &e) {
            fits.push_back({{"model", to_string(m)}, {"error", e.what()}});
        }
    }
    summary["fits"] = fits;
    summary["fit"] = best ? fit_json(*best) : json(nullptr);
    if (exp.channel.kind == ChannelKind::quantum && best && best->model == DecayModel::exponential &&
        cfg.epsilon > 0.0) {
        summary["C"] = best->rate / (cfg.epsilon * cfg.epsilon * (3.0 * cfg.n_qubits * cfg.n_qubits + cfg.n_qubits));
    }
    try {
        summary["t_f"] = crossing_time(curve.f, cfg.level);
    } catch (const FitError &) {
        summary["t_f"] = nullptr;
    }

    Sink sink(cfg.out);
    if (cfg.format == "json") {
        json c = json::array();
        for (std::size_t t = 0; t < curve.size(); ++t) {
            c.push_back({t, curve.f[t], curve.f_err[t]});
        }
        summary["curve"] = c;
        sink.out() << summary.dump(1) << '\n';
        sink.finish();
        return 0;
    }
    write_csv_header(sink.out(), "fidelity", cfg);
    prec(sink.out()) << "t,f_mean,f_stderr\n";
    for (std::size_t t = 0; t < curve.size(); ++t) {
        sink.out() << t << ',' << curve.f[t] << ',' << curve.f_err[t] << '\n';
    }
    sink.finish();
    if (cfg.out.empty()) {
        std::cerr << summary.dump(1) << '\n';
    } else {
        std::ofstream js(cfg.out + ".summary.json", std::ios::binary);
        js << summary.dump(1) << '\n';
        if (!js) {
            throw RuntimeFailure("cannot write " + cfg.out + ".summary.json");
        }
    }
    return 0;
}

int run_tf_scan(const RunConfig &cfg) {
    std::vector<int> nqs = cfg.nq_list.empty() ? std::vector<int>{4, 5, 6, 7, 8} : cfg.nq_list;
    std::vector<double> eps = cfg.epsilon_list.empty() ? std::vector<double>{3e-3, 1e-2, 3e-2} : cfg.epsilon_list;
    TfSweepOptions opt;
    opt.K = cfg.K;
    opt.n_noise = cfg.realizations;
    opt.initial = {cfg.initial, cfg.theta0, cfg.p0};
    opt.master_seed = cfg.seed;
    opt.level = cfg.level;
    opt.jobs = cfg.jobs;
    auto recs = sweep_tf(nqs, eps, opt);
    Sink sink(cfg.out);
    if (cfg.format == "json") {
        json j = config_json("tf-scan", cfg);
        json rows = json::array();
        for (const auto &r : recs) {
            rows.push_back({{"n_qubits", r.n_qubits}, {"epsilon", r.epsilon}, {"t_f", r.t_f}, {"collapse", r.collapse()}});
        }
        j["rows"] = rows;
        sink.out() << j.dump(1) << '\n';
    } else {
        write_csv_header(sink.out(), "tf-scan", cfg);
        prec(sink.out()) << "n_qubits,epsilon,t_f,collapse\n";
        for (const auto &r : recs) {
            sink.out() << r.n_qubits << ',' << r.epsilon << ',' << r.t_f << ',' << r.collapse() << '\n';
        }
    }
    sink.finish();
    return 0;
}

int run_rate_vs_k(const RunConfig &cfg) {
    std::vector<double> Ks = cfg.K_list.empty() ? std::vector<double>{0.5, 1.0, 2.0, 5.0, -0.5} : cfg.K_list;
    RateSweepOptions opt;
    opt.n_qubits = cfg.n_qubits;
    opt.epsilon = cfg.epsilon;
    opt.regime = cfg.regime;
    opt.n_initial = cfg.ensemble;
    opt.n_noise = cfg.realizations;
    opt.master_seed = cfg.seed;
    opt.jobs = cfg.jobs;
    if (!(cfg.epsilon > 0.0)) {
        throw ConfigError("rate-vs-k needs epsilon > 0");
    }
    auto recs = sweep_rate_vs_K(Ks, {{cfg.initial, cfg.theta0, cfg.p0}}, opt);
    Sink sink(cfg.out);
    if (cfg.format == "json") {
        json j = config_json("rate-vs-k", cfg);
        json rows = json::array();
        for (const auto &r : recs) {
            json row = fit_json(r.fit);
            row["K"] = r.K;
            row["initial"] = to_string(r.initial.kind);
            row["rate_stderr"] = r.rate_stderr;
            row["lambda"] = r.lyapunov;
            rows.push_back(row);
        }
        j["rows"] = rows;
        sink.out() << j.dump(1) << '\n';
    } else {
        write_csv_header(sink.out(), "rate-vs-k", cfg);
        prec(sink.out()) << "K,initial,theta0,p0,rate,rate_stderr,r2,model,lambda\n";
        for (const auto &r : recs) {
            sink.out() << r.K << ',' << to_string(r.initial.kind) << ',' << r.initial.theta0 << ',' << r.initial.p0
                       << ',' << r.fit.rate << ',' << r.rate_stderr << ',' << r.fit.r_squared << ','
                       << to_string(r.fit.model) << ',' << r.lyapunov << '\n';
        }
    }
    sink.finish();
    return 0;
}

int run_circuit_check(const RunConfig &cfg, const std::string &dump_path) {
    std::vector<int> nqs = cfg.nq_list.empty() ? std::vector<int>{cfg.n_qubits} : cfg.nq_list;
    struct Row {
        int nq;
        std::size_t h, cp, ng;
        double dev;
        bool ok;
    };
    std::vector<Row> rows;
    bool all_ok = true;
    for (int nq : nqs) {
        auto lattice = LatticeParams::make(nq, cfg.K);
        auto prog = build_sawtooth_circuit(lattice);
        double worst = 0.0;
        for (int s = 0; s < cfg.ensemble; ++s) {
            auto psi = random_state(lattice, derive_seed(cfg.seed, StreamTag::initial_state,
                                                         {static_cast<std::uint64_t>(nq), static_cast<std::uint64_t>(s)}));
            auto c = psi;
            run_step_ideal(c, prog);
            c.apply_global_phase(prog.global_phase);
            worst = std::max(worst, max_abs_difference(c.amplitudes(), step_exact(psi).amplitudes()));
        }
        bool ok = prog.hadamard_count() == static_cast<std::size_t>(2 * nq) &&
                  prog.cphase_count() == static_cast<std::size_t>(3 * nq * nq - nq) && worst < 1e-10;
        all_ok = all_ok && ok;
        rows.push_back({nq, prog.hadamard_count(), prog.cphase_count(), prog.size(), worst, ok});
        if (!dump_path.empty() && nq == nqs.front()) {
            std::ofstream d(dump_path, std::ios::binary);
            if (!d) {
                throw RuntimeFailure("cannot open dump file " + dump_path);
            }
            write_circuit_dump(d, prog);
        }
    }
    Sink sink(cfg.out);
    if (cfg.format == "json") {
        json j = config_json("circuit-check", cfg);
        json arr = json::array();
        for (const auto &r : rows) {
            arr.push_back({{"n_qubits", r.nq}, {"hadamards", r.h}, {"cphases", r.cp}, {"n_g", r.ng},
                           {"max_deviation", r.dev}, {"ok", r.ok}});
        }
        j["rows"] = arr;
        sink.out() << j.dump(1) << '\n';
    } else {
        write_csv_header(sink.out(), "circuit-check", cfg);
        prec(sink.out()) << "n_qubits,hadamards,cphases,n_g,max_deviation,ok\n";
        for (const auto &r : rows) {
            sink.out() << r.nq << ',' << r.h << ',' << r.cp << ',' << r.ng << ',' << r.dev << ','
                       << (r.ok ? "true" : "false") << '\n';
        }
    }
    sink.finish();
    if (!all_ok) {
        std::cerr << "circuit-check: gate counts or oracle deviation out of contract\n";
        return 2;
    }
    return 0;
}

int run_scattering(const RunConfig &cfg) {
    ExperimentConfig exp = to_experiment(cfg);
    exp.keep_members = true;
    const int t = cfg.t_max;
    FidelityCurve direct = fidelity_curve(exp);
    bool ok = true;
    json rows = json::array();
    std::ostringstream csv;
    prec(csv) << "member,t,sigma_z,sigma_y,fidelity,direct,sampled_fidelity\n";
    for (std::size_t m = 0; m < exp.ensemble_size(); ++m) {
        auto r = scattering_fidelity(exp, t, m, cfg.shots);
        double d = direct.members[m][static_cast<std::size_t>(t)];
        ok = ok && std::abs(r.fidelity - d) < 1e-12;
        csv << m << ',' << t << ',' << r.sigma_z << ',' << r.sigma_y << ',' << r.fidelity << ',' << d << ',';
        if (cfg.shots > 0) {
            csv << r.sampled_fidelity;
        }
        csv << '\n';
        json row{{"member", m}, {"t", t}, {"sigma_z", r.sigma_z}, {"sigma_y", r.sigma_y},
                 {"fidelity", r.fidelity}, {"direct", d}};
        if (cfg.shots > 0) {
            row["sampled_fidelity"] = r.sampled_fidelity;
        }
        rows.push_back(row);
    }
    Sink sink(cfg.out);
    if (cfg.format == "json") {
        json j = config_json("scattering", cfg);
        j["rows"] = rows;
        sink.out() << j.dump(1) << '\n';
    } else {
        write_csv_header(sink.out(), "scattering", cfg);
        sink.out() << csv.str();
    }
    sink.finish();
    if (!ok) {
        std::cerr << "scattering: ancilla fidelity disagrees with the direct overlap\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qsaw: quantum sawtooth map fidelity experiments"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file")->check(CLI::ExistingFile);

    // Flag name -> config key. Values stay textual so the config parser
    // does the conversion for both sources.
    const std::vector<std::pair<std::string, std::string>> flags = {
        {"--nq", "nq"},
        {"--K", "K"},
        {"--epsilon", "epsilon"},
        {"--deltaK", "deltaK"},
        {"--tmax", "tmax"},
        {"--ensemble", "ensemble"},
        {"--realizations", "realizations"},
        {"--seed", "seed"},
        {"--regime", "regime"},
        {"--initial", "initial"},
        {"--theta0", "theta0"},
        {"--p0", "p0"},
        {"--out", "out"},
        {"--format", "format"},
        {"--jobs", "jobs"},
        {"--shots", "shots"},
        {"--level", "level"},
        {"--nq-list", "nq-list"},
        {"--K-list", "K-list"},
        {"--epsilon-list", "epsilon-list"},
    };
    const std::map<std::string, std::string> help = {
        {"nq", "number of qubits, N = 2^nq"},
        {"K", "rescaled kick strength"},
        {"epsilon", "gate-noise amplitude"},
        {"deltaK", "kick-noise amplitude (classical error channel)"},
        {"tmax", "map steps (scattering: the step t)"},
        {"ensemble", "initial states"},
        {"realizations", "noise realizations per initial state"},
        {"seed", "master seed"},
        {"regime", "memoryless or static gate noise"},
        {"initial", "gaussian, gaussian-uniform or random"},
        {"theta0", "packet center angle"},
        {"p0", "packet center momentum"},
        {"out", "output path (default stdout)"},
        {"format", "csv or json"},
        {"jobs", "worker threads"},
        {"shots", "scattering measurement shots (0: analytic only)"},
        {"level", "fidelity threshold for t_f"},
        {"nq-list", "comma-separated qubit counts"},
        {"K-list", "comma-separated K values"},
        {"epsilon-list", "comma-separated epsilon values"},
    };
    std::map<std::string, std::string> given;
    std::vector<CLI::Option *> options;
    for (const auto &[flag, key] : flags) {
        options.push_back(app.add_option(flag, given[key], help.at(key)));
    }
    bool no_timestamp = false;
    auto *nots = app.add_flag("--no-timestamp", no_timestamp, "omit the generation time from output headers");

    std::string dump_path;
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"poincare", "orbits of the classical map from the section seeds"},
        {"lyapunov", "closed-form and numerical Lyapunov exponents"},
        {"fidelity", "ensemble fidelity curve with decay fits"},
        {"tf-scan", "t_f over a (nq, epsilon) grid"},
        {"rate-vs-k", "gate-noise decay rate over a K list"},
        {"circuit-check", "gate counts and noiseless circuit vs exact propagator"},
        {"scattering", "ancilla-readout fidelity vs direct overlap"},
    };
    for (const auto &[name, desc] : subs) {
        auto *sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        if (name == "circuit-check") {
            sub->add_option("--dump", dump_path, "write the gate listing of the first nq here");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            apply_config_text(cfg, read_config_file(config_path));
        }
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (options[i]->count() > 0) {
                set_config_value(cfg, flags[i].second, given[flags[i].second]);
            }
        }
        if (nots->count() > 0) {
            cfg.no_timestamp = no_timestamp;
        }
        cfg.validate();
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (cmd == "poincare") {
            return run_poincare(cfg);
        }
        if (cmd == "lyapunov") {
            return run_lyapunov(cfg);
        }
        if (cmd == "fidelity") {
            return run_fidelity(cfg);
        }
        if (cmd == "tf-scan") {
            return run_tf_scan(cfg);
        }
        if (cmd == "rate-vs-k") {
            return run_rate_vs_k(cfg);
        }
        if (cmd == "circuit-check") {
            return run_circuit_check(cfg, dump_path);
        }
        if (cmd == "scattering") {
            return run_scattering(cfg);
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
