// SPDX-License-Identifier: Apache-2.0
//
// lisim - link-level simulator for uplink large-intelligent-surface systems
// Copyright (C) 2026 the lisim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef LISIM_RNG_HPP
#define LISIM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace lisim::rng {

// Finalizer of SplitMix64. Bijective on 64-bit ints, used both as a seed
// expander and to derive independent substreams from (seed, tag, indices).
inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Substream tags. Streams with different tags or indices never collide in
// practice; each (seed, tag, a, b, c) tuple maps to one generator state.
enum class Stream : std::uint64_t {
    pair_geometry = 1,  // per-pair LOS state, Rician factor, path angles
    trial_error = 2,    // per (trial, device) estimation-error vector
    trial_fading = 3,   // per (trial, pair) NLOS fading vector
    trial_noise = 4,    // per (trial, device) receiver noise (oracle use)
};

inline std::uint64_t derive_stream(std::uint64_t seed, Stream tag,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (static_cast<std::uint64_t>(tag) * 0xD6E8FEB86659FD93ULL));
    h = mix64(h ^ (a + 0x2545F4914F6CDD1DULL));
    h = mix64(h ^ (b + 0x9E6C63D0876A9A62ULL));
    h = mix64(h ^ (c + 0xCA5A826395121157ULL));
    return h;
}

// xoshiro256++ by Blackman & Vigna. Small state, fast, and deterministic
// across platforms, which the reproducibility contract requires.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            word = mix64(sm);
        }
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1]; safe as a log() argument.
    double uniform_pos() noexcept { return 1.0 - uniform(); }

    // Standard real normal via Box-Muller (second variate discarded).
    double normal() noexcept {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        return r * std::cos(two_pi * uniform());
    }

    // Circularly-symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal() noexcept {
        const double r = std::sqrt(-std::log(uniform_pos()));
        const double phi = two_pi * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    static constexpr double two_pi = 6.283185307179586476925286766559;

    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

inline Xoshiro256pp make_stream(std::uint64_t seed, Stream tag, std::uint64_t a = 0,
                                std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
    return Xoshiro256pp(derive_stream(seed, tag, a, b, c));
}

}  // namespace lisim::rng

#endif  // LISIM_RNG_HPP
