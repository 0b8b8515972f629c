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

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>

namespace qsaw::fft {

enum class Direction : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

class PlanCache {
  public:
    ~PlanCache() {
        std::lock_guard lock(mu_);
        for (auto &[key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

    // Planning is not thread-safe in FFTW; execution of an existing plan on
    // a different array is.
    fftw_plan get(std::size_t n, Direction dir) {
        std::lock_guard lock(mu_);
        auto key = std::make_pair(n, static_cast<int>(dir));
        auto it = plans_.find(key);
        if (it != plans_.end()) {
            return it->second;
        }
        auto *buf = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, static_cast<int>(dir),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline PlanCache &plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace detail

/// Unnormalized in-place DFT. forward: sum_j x_j e^{-2 pi i jk/n}; backward: e^{+2 pi i jk/n}.
inline void transform_in_place(std::span<std::complex<double>> data, Direction dir) {
    if (data.size() <= 1) {
        return;
    }
    fftw_plan plan = detail::plan_cache().get(data.size(), dir);
    auto *p = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(plan, p, p);
}

}  // namespace qsaw::fft
