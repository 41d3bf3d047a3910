// rng.hpp - Seeded random helpers shared by the generator and optimizers.
//
// Copyright 2026 The ncsynth Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NCSYNTH_RNG_HPP
#define NCSYNTH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ncsynth {

using Rng = std::mt19937_64;

// Uniform double in [0, 1). Hand-rolled from the raw 64-bit stream so results
// depend only on the seed, not on library distribution internals.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return n <= 1 ? 0 : rng() % n;
}

// Standard exponential via inversion; argument kept away from zero.
inline double exponential(Rng& rng) { return -std::log(1.0 - uniform01(rng)); }

}  // namespace ncsynth

#endif  // NCSYNTH_RNG_HPP
