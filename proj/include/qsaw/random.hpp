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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace qsaw {

/// Stream tags keep independent experiment families decoupled when they
/// share a master seed.
enum class StreamTag : std::uint32_t {
    classical_kick = 1,
    gate_noise = 2,
    initial_state = 3,
    packet_center = 4,
    shots = 5,
    quantum_kick = 6,
};

/// Builds a generator for the stream identified by (master, tag, keys...).
///
/// The derivation goes through std::seed_seq, so a stream depends only on
/// its coordinates and never on the order in which streams are created.
inline std::mt19937_64 derive_stream(std::uint64_t master, StreamTag tag,
                                     std::initializer_list<std::uint64_t> keys = {}) {
    std::vector<std::uint32_t> words;
    words.reserve(3 + 2 * keys.size());
    words.push_back(static_cast<std::uint32_t>(master));
    words.push_back(static_cast<std::uint32_t>(master >> 32));
    words.push_back(static_cast<std::uint32_t>(tag));
    for (std::uint64_t k : keys) {
        words.push_back(static_cast<std::uint32_t>(k));
        words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

/// Derives a child seed, for handing a sub-stream to another component.
inline std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                                 std::initializer_list<std::uint64_t> keys = {}) {
    auto gen = derive_stream(master, tag, keys);
    return gen();
}

/// Uniform draws on [-amplitude, +amplitude].
inline double uniform_symmetric(std::mt19937_64 &gen, double amplitude) {
    if (amplitude == 0.0) {
        // Still advance the stream so zero-amplitude runs consume draws identically.
        (void)gen();
        return 0.0;
    }
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    return dist(gen);
}

/// Sequential per-step stream of uniform perturbations, one draw per map step.
class UniformStepNoise {
  public:
    UniformStepNoise(double amplitude, std::uint64_t seed) : amplitude_(amplitude), gen_(seed) {
    }

    double next() {
        return uniform_symmetric(gen_, amplitude_);
    }

    double amplitude() const {
        return amplitude_;
    }

  private:
    double amplitude_;
    std::mt19937_64 gen_;
};

}  // namespace qsaw
