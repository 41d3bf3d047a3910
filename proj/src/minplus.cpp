// minplus.cpp - Closed forms for token-bucket / rate-latency curve algebra.
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

#include "ncsynth/minplus.hpp"

namespace ncsynth {

SymTokenBucket aggregate(ExprPool& pool, const SymTokenBucket& a1,
                         const SymTokenBucket& a2) {
    return {pool.add(a1.rate, a2.rate), pool.add(a1.burst, a2.burst)};
}

SymRateLatency convolve(ExprPool& pool, const SymRateLatency& b1,
                        const SymRateLatency& b2) {
    return {pool.min(b1.rate, b2.rate), pool.add(b1.latency, b2.latency)};
}

SymTokenBucket deconvolve(ExprPool& pool, const SymTokenBucket& a,
                          const SymRateLatency& b) {
    return {a.rate, pool.add(a.burst, pool.mul(a.rate, b.latency))};
}

SymRateLatency leftover(ExprPool& pool, const SymRateLatency& b,
                        const SymTokenBucket& a) {
    double r, big_r;
    if (pool.is_constant(a.rate, &r) && pool.is_constant(b.rate, &big_r) &&
        r >= big_r) {
        throw StabilityViolation("left-over service undefined: cross rate " +
                                 std::to_string(r) + " >= server rate " +
                                 std::to_string(big_r));
    }
    ExprId residual_rate = pool.sub(b.rate, a.rate);
    ExprId inflated = pool.add(a.burst, pool.mul(b.rate, b.latency));
    return {residual_rate, pool.div(inflated, residual_rate)};
}

ExprId delay_bound(ExprPool& pool, const SymTokenBucket& a,
                   const SymRateLatency& b) {
    return pool.add(pool.div(a.burst, b.rate), b.latency);
}

SymTokenBucket scale(ExprPool& pool, const SymTokenBucket& a, ExprId p) {
    return {pool.mul(p, a.rate), pool.mul(p, a.burst)};
}

}  // namespace ncsynth
