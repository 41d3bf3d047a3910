// sfa.cpp - SFA backtracking with p-weighted cross traffic.
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

#include "ncsynth/sfa.hpp"

#include <algorithm>

namespace ncsynth {

namespace {

inline std::uint64_t pair_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

}  // namespace

SfaAnalyzer::SfaAnalyzer(const ProblemInstance& instance, ExprPool& pool,
                         SfaOptions options)
    : inst_(instance), pool_(pool), opts_(options) {
    pool_.declare_variables(static_cast<std::uint32_t>(inst_.var_count));
}

SymTokenBucket SfaAnalyzer::arrival_at(int vf_index, int server) {
    const VirtualFlow& vf = inst_.virtual_flows[vf_index];
    auto it = std::find(vf.path.begin(), vf.path.end(), server);
    if (it == vf.path.end())
        throw ValidationError("arrival_at: server not on the virtual flow's path");
    return arrival_at_pos(vf_index, static_cast<int>(it - vf.path.begin()));
}

SymTokenBucket SfaAnalyzer::arrival_at_pos(int vf_index, int pos) {
    const VirtualFlow& vf = inst_.virtual_flows[vf_index];
    std::uint64_t key = pair_key(vf_index, vf.path[pos]);
    if (opts_.memoize) {
        auto it = arrival_cache_.find(key);
        if (it != arrival_cache_.end()) return it->second;
    }
    SymTokenBucket result;
    if (pos == 0) {
        const TokenBucket& a = inst_.flows[vf.flow_index].arrival;
        result = scale(pool_, sym_curve(pool_, a.rate, a.burst),
                       pool_.variable(static_cast<std::uint32_t>(vf.var_id)));
    } else {
        result = deconvolve(pool_, arrival_at_pos(vf_index, pos - 1),
                            leftover_at_pos(vf_index, pos - 1));
    }
    if (opts_.memoize) arrival_cache_.emplace(key, result);
    return result;
}

SymRateLatency SfaAnalyzer::leftover_at_pos(int vf_index, int pos) {
    const VirtualFlow& vf = inst_.virtual_flows[vf_index];
    int server = vf.path[pos];
    // Branches of one variable see the same cross traffic, so the left-over
    // is cached per (var, server).
    std::uint64_t key = pair_key(vf.var_id, server);
    if (opts_.memoize) {
        auto it = leftover_cache_.find(key);
        if (it != leftover_cache_.end()) return it->second;
    }
    SymTokenBucket cross;
    SymRateLatency result;
    if (cross_aggregate(vf.var_id, server, &cross)) {
        result = leftover(pool_, service_of(server), cross);
    } else {
        result = service_of(server);
    }
    if (opts_.memoize) leftover_cache_.emplace(key, result);
    return result;
}

SymRateLatency SfaAnalyzer::service_of(int server) {
    if (opts_.memoize) {
        auto it = service_cache_.find(server);
        if (it != service_cache_.end()) return it->second;
    }
    const Server& s = inst_.graph.servers[server];
    SymRateLatency result;
    if (!opts_.derive_priority_service || s.priority_level == 0) {
        result = sym_service(pool_, s.service.rate, s.service.latency);
    } else {
        int base = inst_.graph.server_at(s.port, 0);
        if (base < 0)
            throw ValidationError("derived priority service requires a level-0 server at port '" +
                                  s.port + "'");
        SymRateLatency port_curve = sym_service(
            pool_, inst_.graph.servers[base].service.rate,
            inst_.graph.servers[base].service.latency);
        bool any = false;
        SymTokenBucket higher{};
        for (int level = 0; level < s.priority_level; ++level) {
            int hs = inst_.graph.server_at(s.port, level);
            if (hs < 0) continue;
            for (auto [var, rep] : inst_.vars_at_server[hs]) {
                SymTokenBucket a = arrival_at(rep, hs);
                higher = any ? aggregate(pool_, higher, a) : a;
                any = true;
            }
        }
        result = any ? leftover(pool_, port_curve, higher) : port_curve;
    }
    if (opts_.memoize) service_cache_.emplace(server, result);
    return result;
}

SfaAnalyzer::ServerAgg SfaAnalyzer::build_agg(int server) {
    ServerAgg agg;
    const auto& entries = inst_.vars_at_server[server];
    agg.var_ids.reserve(entries.size());
    agg.arrivals.reserve(entries.size());
    for (auto [var, rep] : entries) {
        agg.var_ids.push_back(var);
        agg.arrivals.push_back(arrival_at(rep, server));
    }
    const std::size_t m = agg.arrivals.size();
    agg.prefix.resize(m);
    agg.suffix.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        agg.prefix[i] = i == 0 ? agg.arrivals[0]
                               : aggregate(pool_, agg.prefix[i - 1], agg.arrivals[i]);
    for (std::size_t i = m; i-- > 0;)
        agg.suffix[i] = i + 1 == m
                            ? agg.arrivals[i]
                            : aggregate(pool_, agg.arrivals[i], agg.suffix[i + 1]);
    return agg;
}

bool SfaAnalyzer::cross_aggregate(int var_id, int server, SymTokenBucket* out) {
    const ServerAgg* agg;
    ServerAgg local;
    if (opts_.memoize) {
        auto it = agg_cache_.find(server);
        if (it == agg_cache_.end())
            it = agg_cache_.emplace(server, build_agg(server)).first;
        agg = &it->second;
    } else {
        local = build_agg(server);
        agg = &local;
    }
    const std::size_t m = agg->var_ids.size();
    auto it = std::lower_bound(agg->var_ids.begin(), agg->var_ids.end(), var_id);
    if (it == agg->var_ids.end() || *it != var_id)
        throw ValidationError("cross_aggregate: variable does not cross the server");
    std::size_t pos = static_cast<std::size_t>(it - agg->var_ids.begin());
    if (m == 1) return false;
    if (pos == 0) {
        *out = agg->suffix[1];
    } else if (pos + 1 == m) {
        *out = agg->prefix[m - 2];
    } else {
        *out = aggregate(pool_, agg->prefix[pos - 1], agg->suffix[pos + 1]);
    }
    return true;
}

std::vector<std::uint32_t> SfaAnalyzer::collect_vars(ExprId root) const {
    std::vector<std::uint32_t> vars;
    std::vector<std::uint8_t> seen(pool_.size(), 0);
    std::vector<ExprId> stack{root};
    while (!stack.empty()) {
        ExprId id = stack.back();
        stack.pop_back();
        if (seen[id]) continue;
        seen[id] = 1;
        const ExprNode& n = pool_.node(id);
        if (n.op == Op::Var) {
            vars.push_back(n.var);
        } else if (n.op == Op::Ramp) {
            stack.push_back(n.a);
        } else if (n.op != Op::Const) {
            stack.push_back(n.a);
            stack.push_back(n.b);
        }
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

DelayTerm SfaAnalyzer::e2e_delay(int vf_index) {
    const VirtualFlow& vf = inst_.virtual_flows[vf_index];
    SymRateLatency end_to_end = leftover_at_pos(vf_index, 0);
    for (std::size_t pos = 1; pos < vf.path.size(); ++pos)
        end_to_end = convolve(pool_, end_to_end,
                              leftover_at_pos(vf_index, static_cast<int>(pos)));
    const TokenBucket& a = inst_.flows[vf.flow_index].arrival;
    DelayTerm term;
    term.vf_index = vf_index;
    term.expr = delay_bound(pool_, sym_curve(pool_, a.rate, a.burst), end_to_end);
    term.vars = collect_vars(term.expr);
    return term;
}

std::vector<DelayTerm> SfaAnalyzer::analyze_all() {
    // Expression construction stays single-threaded: node ids (and with them
    // the compiled tape) must not depend on thread scheduling. The repeated
    // cost is evaluation, which parallelizes in the compiled graph.
    std::vector<DelayTerm> terms;
    terms.reserve(inst_.virtual_flows.size());
    for (int i = 0; i < static_cast<int>(inst_.virtual_flows.size()); ++i)
        terms.push_back(e2e_delay(i));
    return terms;
}

std::vector<DelayTerm> analyze_all(const ProblemInstance& instance, ExprPool& pool,
                                   SfaOptions options) {
    SfaAnalyzer analyzer(instance, pool, options);
    return analyzer.analyze_all();
}

}  // namespace ncsynth
