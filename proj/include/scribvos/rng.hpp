// This file is part of the scribvos project, a scribble-initialized video
// object segmentation toolkit.
//
// Copyright 2026 the scribvos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>

namespace scribvos {

/// Deterministic RNG with hand-rolled distributions. The standard-library
/// distributions are implementation-defined, so we avoid them everywhere a
/// seed must reproduce the same stream across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : m_state(seed) {}

    // splitmix64
    std::uint64_t next_u64() {
        std::uint64_t z = (m_state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// uniform integer in [lo, hi] inclusive
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// standard normal via Box-Muller
    double normal() {
        if (m_has_cached) {
            m_has_cached = false;
            return m_cached;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        m_cached = r * std::sin(theta);
        m_has_cached = true;
        return r * std::cos(theta);
    }

    /// Derives an independent child seed for a named substream; used to give
    /// every (sample, frame, object) its own reproducible generator.
    std::uint64_t fork(std::uint64_t stream) const {
        std::uint64_t z = m_state ^ (0x9e3779b97f4a7c15ull + stream * 0xd1342543de82ef95ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t m_state;
    double m_cached = 0.0;
    bool m_has_cached = false;
};

} // namespace scribvos
