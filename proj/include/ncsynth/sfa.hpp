// sfa.hpp - Parameterized end-to-end delay bounds by separated flow analysis.
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
// For every virtual flow the analyzer derives a delay-bound expression over
// the selection variables: per server, the service left over after
// subtracting the aggregate of all other virtual flows' (p-weighted) arrival
// bounds; those left-over curves convolved along the path; the delay bound
// taken against the flow's own (unscaled) arrival curve. Selection of the
// flow itself is applied by the objective weighting, not inside its bound.

#ifndef NCSYNTH_SFA_HPP
#define NCSYNTH_SFA_HPP

#include <unordered_map>
#include <vector>

#include "ncsynth/minplus.hpp"
#include "ncsynth/netmodel.hpp"

namespace ncsynth {

// Delay-bound expression of one virtual flow plus the variables it touches.
struct DelayTerm {
    int vf_index = -1;
    ExprId expr = kNoExpr;
    std::vector<std::uint32_t> vars;  // referenced var ids, ascending
};

struct SfaOptions {
    // Caches (vf, server) arrival bounds and per-server aggregates. Turning
    // this off recomputes everything per query; results are identical, only
    // viable on small instances.
    bool memoize = true;
    // When set, the service of a level-k server is derived as the left-over
    // of its port's level-0 curve after subtracting all strictly
    // higher-priority virtual-flow arrivals at that port (p-weighted). By
    // default each (port, level) server's configured curve is used as-is.
    bool derive_priority_service = false;
};

class SfaAnalyzer {
public:
    SfaAnalyzer(const ProblemInstance& instance, ExprPool& pool,
                SfaOptions options = {});

    // p-weighted arrival bound of a virtual flow at a server on its path
    // (the bound holding at that server's input).
    SymTokenBucket arrival_at(int vf_index, int server);

    DelayTerm e2e_delay(int vf_index);

    // One DelayTerm per virtual flow, sharing memoized subexpressions.
    std::vector<DelayTerm> analyze_all();

private:
    struct ServerAgg {
        std::vector<int> var_ids;               // sorted, from vars_at_server
        std::vector<SymTokenBucket> arrivals;   // per representative branch
        std::vector<SymTokenBucket> prefix;     // prefix[i] = sum arrivals[0..i]
        std::vector<SymTokenBucket> suffix;     // suffix[i] = sum arrivals[i..m-1]
    };

    SymTokenBucket arrival_at_pos(int vf_index, int pos);
    SymRateLatency leftover_at_pos(int vf_index, int pos);
    SymRateLatency service_of(int server);
    ServerAgg build_agg(int server);
    // Aggregate of all other variables' arrivals at the server; false when
    // the flow is alone there.
    bool cross_aggregate(int var_id, int server, SymTokenBucket* out);
    std::vector<std::uint32_t> collect_vars(ExprId root) const;

    const ProblemInstance& inst_;
    ExprPool& pool_;
    SfaOptions opts_;
    std::unordered_map<std::uint64_t, SymTokenBucket> arrival_cache_;
    std::unordered_map<std::uint64_t, SymRateLatency> leftover_cache_;
    std::unordered_map<int, ServerAgg> agg_cache_;
    std::unordered_map<int, SymRateLatency> service_cache_;
};

// Convenience wrapper building an analyzer and running analyze_all.
std::vector<DelayTerm> analyze_all(const ProblemInstance& instance, ExprPool& pool,
                                   SfaOptions options = {});

}  // namespace ncsynth

#endif  // NCSYNTH_SFA_HPP
