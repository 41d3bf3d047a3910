// minplus.hpp - Closed-form (min,plus) operations over symbolic curve parameters.
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
//
// All operations take token-bucket arrival curves gamma(r,B) and rate-latency
// service curves beta(R,L) whose parameters are expression nodes, and produce
// new curves whose parameters are expression nodes. Nothing is evaluated here;
// numeric results come from evaluating the resulting DAG.

#ifndef NCSYNTH_MINPLUS_HPP
#define NCSYNTH_MINPLUS_HPP

#include "ncsynth/expr.hpp"

namespace ncsynth {

// Token-bucket arrival curve B + r*t with symbolic parameters.
struct SymTokenBucket {
    ExprId rate;
    ExprId burst;
};

// Rate-latency service curve R*[t-L]^+ with symbolic parameters.
struct SymRateLatency {
    ExprId rate;
    ExprId latency;
};

// Stand-in for an infinite-rate service curve (convolution identity).
inline constexpr double kInfiniteRate = 1e18;

inline SymTokenBucket sym_curve(ExprPool& pool, double rate, double burst) {
    return {pool.constant(rate), pool.constant(burst)};
}
inline SymRateLatency sym_service(ExprPool& pool, double rate, double latency) {
    return {pool.constant(rate), pool.constant(latency)};
}

// gamma(r1,B1) + gamma(r2,B2) = gamma(r1+r2, B1+B2)
SymTokenBucket aggregate(ExprPool& pool, const SymTokenBucket& a1,
                         const SymTokenBucket& a2);

// beta(R1,L1) (x) beta(R2,L2) = beta(min(R1,R2), L1+L2)
SymRateLatency convolve(ExprPool& pool, const SymRateLatency& b1,
                        const SymRateLatency& b2);

// gamma(r,B) (/) beta(R,L) = gamma(r, B + r*L)
SymTokenBucket deconvolve(ExprPool& pool, const SymTokenBucket& a,
                          const SymRateLatency& b);

// beta(R,L) (-) gamma(r,B) = beta(R-r, (B + R*L) / (R-r)).
// Requires r < R; when both rates are constants this is checked immediately,
// otherwise the division traps at evaluation time.
SymRateLatency leftover(ExprPool& pool, const SymRateLatency& b,
                        const SymTokenBucket& a);

// h(gamma(r,B), beta(R,L)) = B/R + L
ExprId delay_bound(ExprPool& pool, const SymTokenBucket& a,
                   const SymRateLatency& b);

// gamma(p*r, p*B) for a selection variable (or any scalar expression) p.
SymTokenBucket scale(ExprPool& pool, const SymTokenBucket& a, ExprId p);

}  // namespace ncsynth

#endif  // NCSYNTH_MINPLUS_HPP
