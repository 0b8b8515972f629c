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
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "qsaw/circuit.hpp"
#include "qsaw/lab.hpp"

namespace qsaw {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Flat run configuration shared by every CLI subcommand. Serialized as one
/// `key=value` per line; keys are the long flag names without dashes.
struct RunConfig {
    int n_qubits = 9;
    double K = 0.5;
    double epsilon = 0.0;
    double deltaK = 0.0;
    int t_max = 100;
    int ensemble = 1;      // initial states
    int realizations = 1;  // noise realizations per initial state
    std::uint64_t seed = 1;
    NoiseRegime regime = NoiseRegime::memoryless;
    InitialKind initial = InitialKind::gaussian;
    double theta0 = 1.0;
    double p0 = 0.0;
    std::string out;  // empty: stdout
    std::string format = "csv";
    int jobs = 1;
    bool no_timestamp = false;
    int shots = 0;
    double level = 0.9;
    std::vector<int> nq_list;
    std::vector<double> K_list;
    std::vector<double> epsilon_list;

    void validate() const;
};

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <typename T>
std::string join(const std::vector<T> &xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) {
            s += ',';
        }
        if constexpr (std::is_floating_point_v<T>) {
            s += format_double(xs[i]);
        } else {
            s += std::to_string(xs[i]);
        }
    }
    return s;
}

inline std::string_view trim(std::string_view s) {
    const char *ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string &key, const std::string &v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception &) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
    if (used != v.size()) {
        throw ConfigError(key + ": trailing characters in '" + v + "'");
    }
    return x;
}

inline long long parse_int(const std::string &key, const std::string &v) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception &) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
    if (used != v.size()) {
        throw ConfigError(key + ": trailing characters in '" + v + "'");
    }
    return x;
}

inline bool parse_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename F>
auto parse_list(const std::string &v, F &&item) {
    std::vector<decltype(item(std::string{}))> xs;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        xs.push_back(item(std::string(trim(tok))));
    }
    return xs;
}

}  // namespace detail

/// Ordered key=value pairs of `c`; doubles keep 17 significant digits so
/// parsing the text back gives an identical config.
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig &c) {
    using detail::format_double;
    return {
        {"nq", std::to_string(c.n_qubits)},
        {"K", format_double(c.K)},
        {"epsilon", format_double(c.epsilon)},
        {"deltaK", format_double(c.deltaK)},
        {"tmax", std::to_string(c.t_max)},
        {"ensemble", std::to_string(c.ensemble)},
        {"realizations", std::to_string(c.realizations)},
        {"seed", std::to_string(c.seed)},
        {"regime", to_string(c.regime)},
        {"initial", to_string(c.initial)},
        {"theta0", format_double(c.theta0)},
        {"p0", format_double(c.p0)},
        {"out", c.out},
        {"format", c.format},
        {"jobs", std::to_string(c.jobs)},
        {"no-timestamp", c.no_timestamp ? "true" : "false"},
        {"shots", std::to_string(c.shots)},
        {"level", format_double(c.level)},
        {"nq-list", detail::join(c.nq_list)},
        {"K-list", detail::join(c.K_list)},
        {"epsilon-list", detail::join(c.epsilon_list)},
    };
}

inline std::string to_config_text(const RunConfig &c) {
    std::string s;
    for (const auto &[k, v] : config_entries(c)) {
        s += k + '=' + v + '\n';
    }
    return s;
}

/// Sets one field from its textual value.
inline void set_config_value(RunConfig &c, const std::string &key, const std::string &v) {
    using namespace detail;
    auto int_in = [&](long long lo, long long hi) {
        long long x = parse_int(key, v);
        if (x < lo || x > hi) {
            throw ConfigError(key + ": " + v + " out of range");
        }
        return static_cast<int>(x);
    };
    try {
        if (key == "nq") {
            c.n_qubits = int_in(1, 26);
        } else if (key == "K") {
            c.K = parse_double(key, v);
        } else if (key == "epsilon") {
            c.epsilon = parse_double(key, v);
        } else if (key == "deltaK") {
            c.deltaK = parse_double(key, v);
        } else if (key == "tmax") {
            c.t_max = int_in(0, 100000000);
        } else if (key == "ensemble") {
            c.ensemble = int_in(1, 100000000);
        } else if (key == "realizations") {
            c.realizations = int_in(1, 100000000);
        } else if (key == "seed") {
            if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
                throw ConfigError("seed: expected a non-negative integer, got '" + v + "'");
            }
            c.seed = std::stoull(v);
        } else if (key == "regime") {
            c.regime = parse_regime(v);
        } else if (key == "initial") {
            c.initial = parse_initial_kind(v);
        } else if (key == "theta0") {
            c.theta0 = parse_double(key, v);
        } else if (key == "p0") {
            c.p0 = parse_double(key, v);
        } else if (key == "out") {
            c.out = v;
        } else if (key == "format") {
            if (v != "csv" && v != "json") {
                throw ConfigError("format: expected csv or json, got '" + v + "'");
            }
            c.format = v;
        } else if (key == "jobs") {
            c.jobs = int_in(1, 4096);
        } else if (key == "no-timestamp") {
            c.no_timestamp = parse_bool(key, v);
        } else if (key == "shots") {
            c.shots = int_in(0, 1000000000);
        } else if (key == "level") {
            c.level = parse_double(key, v);
        } else if (key == "nq-list") {
            c.nq_list = parse_list(v, [&](const std::string &s) { return static_cast<int>(parse_int(key, s)); });
        } else if (key == "K-list") {
            c.K_list = parse_list(v, [&](const std::string &s) { return parse_double(key, s); });
        } else if (key == "epsilon-list") {
            c.epsilon_list = parse_list(v, [&](const std::string &s) { return parse_double(key, s); });
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(key + ": " + e.what());
    }
}

/// Parses `key=value` lines; blank lines and lines starting with '#' are
/// skipped. Returns the pairs in file order.
inline std::vector<std::pair<std::string, std::string>> parse_config_entries(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        }
        out.emplace_back(std::string(detail::trim(line.substr(0, eq))),
                         std::string(detail::trim(line.substr(eq + 1))));
    }
    return out;
}

inline void apply_config_text(RunConfig &c, std::string_view text) {
    for (const auto &[k, v] : parse_config_entries(text)) {
        set_config_value(c, k, v);
    }
}

inline RunConfig parse_config_text(std::string_view text) {
    RunConfig c;
    apply_config_text(c, text);
    return c;
}

inline std::string read_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void RunConfig::validate() const {
    if (!std::isfinite(K) || !std::isfinite(theta0) || !std::isfinite(p0)) {
        throw ConfigError("K, theta0 and p0 must be finite");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon) || !(deltaK >= 0.0) || !std::isfinite(deltaK)) {
        throw ConfigError("epsilon and deltaK must be finite and non-negative");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("level must lie in (0, 1)");
    }
    for (int nq : nq_list) {
        if (nq < 1 || nq > 26) {
            throw ConfigError("nq-list entries must lie in [1, 26]");
        }
    }
    for (double e : epsilon_list) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw ConfigError("epsilon-list entries must be positive");
        }
    }
}

/// Experiment configuration for the fidelity runs.
inline ExperimentConfig to_experiment(const RunConfig &c) {
    ExperimentConfig e;
    e.lattice = LatticeParams::make(c.n_qubits, c.K);
    if (c.deltaK > 0.0 && c.epsilon > 0.0) {
        throw ConfigError("set either epsilon (gate noise) or deltaK (kick noise), not both");
    }
    e.channel = c.deltaK > 0.0 ? ErrorChannel::classical(c.deltaK) : ErrorChannel::quantum(c.epsilon, c.regime);
    e.initial = {c.initial, c.theta0, c.p0};
    e.t_max = c.t_max;
    e.n_initial = c.ensemble;
    e.n_noise = c.realizations;
    e.master_seed = c.seed;
    e.jobs = c.jobs;
    return e;
}

}  // namespace qsaw
