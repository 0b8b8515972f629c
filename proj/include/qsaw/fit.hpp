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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsaw {

class FitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Ensemble-averaged fidelity f(t), t = 0..size-1.
struct FidelityCurve {
    std::vector<double> f;
    std::vector<double> f_err;                 // standard error over members
    std::vector<std::vector<double>> members;  // per-member curves, when kept

    std::size_t size() const {
        return f.size();
    }
    int t_max() const {
        return static_cast<int>(f.size()) - 1;
    }
};

/// Averages member curves of equal length.
inline FidelityCurve average_curves(std::vector<std::vector<double>> members, bool keep_members) {
    if (members.empty()) {
        throw std::invalid_argument("average_curves: no members");
    }
    const std::size_t len = members.front().size();
    const double m = static_cast<double>(members.size());
    FidelityCurve c;
    c.f.assign(len, 0.0);
    c.f_err.assign(len, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
        double s = 0.0;
        for (const auto &row : members) {
            s += row[t];
        }
        double mean = s / m;
        double ss = 0.0;
        for (const auto &row : members) {
            ss += (row[t] - mean) * (row[t] - mean);
        }
        c.f[t] = mean;
        c.f_err[t] = members.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
    }
    if (keep_members) {
        c.members = std::move(members);
    }
    return c;
}

enum class DecayModel {
    exponential,  // f = e^{-rate t}
    gaussian,     // f = e^{-rate t^2}, rate = 1 / tau^2
};

inline const char *to_string(DecayModel m) {
    return m == DecayModel::exponential ? "exponential" : "gaussian";
}

struct FitWindow {
    double lo = 0.1;
    double hi = 0.9;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    std::size_t points = 0;
};

inline LinearFit linear_least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw FitError("linear_least_squares: need at least two paired points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw FitError("linear_least_squares: degenerate abscissae");
    }
    LinearFit fit;
    fit.points = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.slope_stderr = x.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
    return fit;
}

struct DecayFit {
    DecayModel model = DecayModel::exponential;
    double rate = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double rate_stderr = 0.0;  // regression standard error of the slope
    FitWindow window;
    std::size_t points = 0;
    int first_t = 0;
    int last_t = 0;
};

/// Fits -log f = a + rate * t (exponential) or a + rate * t^2 (gaussian) over
/// the steps t >= 1 with f inside the window, stopping at the first step
/// that falls below the window.
inline DecayFit fit_decay(std::span<const double> f, DecayModel model, FitWindow window = {}) {
    std::vector<double> xs;
    std::vector<double> ys;
    int first = -1;
    int last = -1;
    for (std::size_t t = 1; t < f.size(); ++t) {
        if (f[t] < window.lo) {
            break;
        }
        if (f[t] > window.hi) {
            continue;
        }
        double x = static_cast<double>(t);
        xs.push_back(model == DecayModel::exponential ? x : x * x);
        ys.push_back(-std::log(f[t]));
        if (first < 0) {
            first = static_cast<int>(t);
        }
        last = static_cast<int>(t);
    }
    if (xs.size() < 5) {
        throw FitError("fit_decay: only " + std::to_string(xs.size()) + " points inside the window [" +
                       std::to_string(window.lo) + ", " + std::to_string(window.hi) + "], need 5");
    }
    LinearFit lin = linear_least_squares(xs, ys);
    DecayFit fit;
    fit.model = model;
    fit.rate = lin.slope;
    fit.intercept = lin.intercept;
    fit.r_squared = lin.r_squared;
    fit.rate_stderr = lin.slope_stderr;
    fit.window = window;
    fit.points = lin.points;
    fit.first_t = first;
    fit.last_t = last;
    return fit;
}

inline DecayFit fit_decay(const FidelityCurve &curve, DecayModel model, FitWindow window = {}) {
    return fit_decay(curve.f, model, window);
}

/// Leave-one-member-out jackknife standard error of the fitted rate.
inline double jackknife_rate_stderr(const FidelityCurve &curve, DecayModel model, FitWindow window = {}) {
    const std::size_t m = curve.members.size();
    if (m < 2) {
        throw FitError("jackknife_rate_stderr: needs at least two kept member curves");
    }
    const std::size_t len = curve.f.size();
    std::vector<double> rates;
    rates.reserve(m);
    std::vector<double> loo(len);
    for (std::size_t skip = 0; skip < m; ++skip) {
        for (std::size_t t = 0; t < len; ++t) {
            loo[t] = (curve.f[t] * static_cast<double>(m) - curve.members[skip][t]) / static_cast<double>(m - 1);
        }
        rates.push_back(fit_decay(loo, model, window).rate);
    }
    double mean = 0.0;
    for (double r : rates) {
        mean += r;
    }
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double r : rates) {
        ss += (r - mean) * (r - mean);
    }
    return std::sqrt(ss * static_cast<double>(m - 1) / static_cast<double>(m));
}

/// First time f drops to `level` or below, linearly interpolated in f between adjacent steps.
inline double crossing_time(std::span<const double> f, double level = 0.9) {
    for (std::size_t t = 1; t < f.size(); ++t) {
        if (f[t] <= level) {
            double f0 = f[t - 1];
            double f1 = f[t];
            if (f0 == f1) {
                return static_cast<double>(t);
            }
            return static_cast<double>(t - 1) + (f0 - level) / (f0 - f1);
        }
    }
    throw FitError("crossing_time: curve never drops below " + std::to_string(level) + " within " +
                   std::to_string(f.empty() ? 0 : f.size() - 1) + " steps");
}

struct TfRecord {
    int n_qubits = 0;
    double epsilon = 0.0;
    double t_f = 0.0;

    double collapse() const {
        return t_f * epsilon * epsilon * n_qubits * n_qubits;
    }
};

inline TfRecord estimate_tf(const FidelityCurve &curve, int n_qubits, double epsilon, double level = 0.9) {
    return {n_qubits, epsilon, crossing_time(curve.f, level)};
}

}  // namespace qsaw
