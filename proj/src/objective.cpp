// objective.cpp - Objective and penalty expression construction.
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

#include "ncsynth/objective.hpp"

#include <stdexcept>

namespace ncsynth {

std::vector<ExprId> flow_weighted_delays(ExprPool& pool,
                                         const ProblemInstance& instance,
                                         const std::vector<DelayTerm>& terms) {
    // Group branch delay terms per variable, in virtual-flow order.
    std::vector<std::vector<ExprId>> branches(instance.var_count);
    for (const DelayTerm& t : terms)
        branches[instance.virtual_flows[t.vf_index].var_id].push_back(t.expr);

    std::vector<ExprId> out;
    out.reserve(instance.flows.size());
    for (const VarBlock& block : instance.blocks) {
        ExprId acc = kNoExpr;
        for (int v = block.first_var; v < block.first_var + block.var_count; ++v) {
            const auto& bs = branches[v];
            ExprId mean = bs.front();
            for (std::size_t i = 1; i < bs.size(); ++i) mean = pool.add(mean, bs[i]);
            if (bs.size() > 1)
                mean = pool.mul(pool.constant(1.0 / static_cast<double>(bs.size())), mean);
            ExprId weighted =
                pool.mul(pool.variable(static_cast<std::uint32_t>(v)), mean);
            acc = acc == kNoExpr ? weighted : pool.add(acc, weighted);
        }
        out.push_back(acc);
    }
    return out;
}

ExprId build_average(ExprPool& pool, const ProblemInstance& instance,
                     const std::vector<DelayTerm>& terms) {
    auto per_flow = flow_weighted_delays(pool, instance, terms);
    ExprId sum = per_flow.front();
    for (std::size_t i = 1; i < per_flow.size(); ++i)
        sum = pool.add(sum, per_flow[i]);
    return pool.mul(pool.constant(1.0 / static_cast<double>(per_flow.size())), sum);
}

namespace {

ExprId apply_utility(ExprPool& pool, const UtilityDescriptor& u, ExprId delay) {
    switch (u.family) {
        case UtilityDescriptor::Family::LinearClamp: {
            ExprId lin =
                pool.add(pool.mul(pool.constant(u.scale), delay), pool.constant(u.offset));
            return pool.min(pool.ramp(lin), pool.constant(1.0));
        }
        case UtilityDescriptor::Family::Logistic: {
            ExprId z = pool.mul(pool.constant(u.scale),
                                pool.sub(delay, pool.constant(u.offset)));
            ExprId abs_z = pool.add(pool.ramp(z), pool.ramp(pool.mul(pool.constant(-1.0), z)));
            ExprId s = pool.div(z, pool.add(pool.constant(1.0), abs_z));
            return pool.add(pool.constant(0.5), pool.mul(pool.constant(0.5), s));
        }
    }
    throw std::invalid_argument("unknown utility family");
}

}  // namespace

ExprId build_utility(ExprPool& pool, const ProblemInstance& instance,
                     const std::vector<DelayTerm>& terms,
                     const std::vector<UtilityDescriptor>& utilities) {
    if (utilities.empty())
        throw std::invalid_argument("utility objective requires at least one descriptor");
    if (utilities.size() != 1 && utilities.size() != instance.flows.size())
        throw std::invalid_argument(
            "utility descriptors must be one (broadcast) or one per flow");
    auto per_flow = flow_weighted_delays(pool, instance, terms);
    ExprId sum = kNoExpr;
    for (std::size_t i = 0; i < per_flow.size(); ++i) {
        const UtilityDescriptor& u =
            utilities.size() == 1 ? utilities[0] : utilities[i];
        ExprId ui = apply_utility(pool, u, per_flow[i]);
        sum = sum == kNoExpr ? ui : pool.add(sum, ui);
    }
    return sum;
}

ExprId build_maxtail(ExprPool& pool, const ProblemInstance& instance,
                     const std::vector<DelayTerm>& terms) {
    auto per_flow = flow_weighted_delays(pool, instance, terms);
    ExprId m = per_flow.front();
    for (std::size_t i = 1; i < per_flow.size(); ++i) m = pool.max(m, per_flow[i]);
    return m;
}

ExprId build_penalties(ExprPool& pool, const ProblemInstance& instance,
                       const std::vector<DelayTerm>& terms, double lambda_cap,
                       double lambda_deadline) {
    ExprId cap_sum = kNoExpr;
    for (std::size_t s = 0; s < instance.graph.servers.size(); ++s) {
        const auto& vars = instance.vars_at_server[s];
        if (vars.empty()) continue;
        ExprId load = kNoExpr;
        for (auto [var, rep] : vars) {
            ExprId contrib = pool.mul(
                pool.variable(static_cast<std::uint32_t>(var)),
                pool.constant(instance.flows[instance.var_flow[var]].arrival.rate));
            load = load == kNoExpr ? contrib : pool.add(load, contrib);
        }
        double cap = instance.utilization_cap * instance.graph.servers[s].service.rate;
        ExprId excess = pool.ramp(pool.add(load, pool.constant(-cap)));
        cap_sum = cap_sum == kNoExpr ? excess : pool.add(cap_sum, excess);
    }

    ExprId deadline_sum = kNoExpr;
    bool any_deadline = false;
    for (const Flow& f : instance.flows)
        if (f.deadline) any_deadline = true;
    if (any_deadline) {
        auto per_flow = flow_weighted_delays(pool, instance, terms);
        for (std::size_t i = 0; i < instance.flows.size(); ++i) {
            if (!instance.flows[i].deadline) continue;
            ExprId excess = pool.ramp(
                pool.add(per_flow[i], pool.constant(-*instance.flows[i].deadline)));
            deadline_sum =
                deadline_sum == kNoExpr ? excess : pool.add(deadline_sum, excess);
        }
    }

    ExprId zero = pool.constant(0.0);
    ExprId total = pool.mul(pool.constant(lambda_cap),
                            cap_sum == kNoExpr ? zero : cap_sum);
    total = pool.add(total, pool.mul(pool.constant(lambda_deadline),
                                     deadline_sum == kNoExpr ? zero : deadline_sum));
    return total;
}

ExprId build_objective(ExprPool& pool, const ProblemInstance& instance,
                       const std::vector<DelayTerm>& terms,
                       const ObjectiveSpec& spec) {
    switch (spec.kind) {
        case ObjectiveKind::Average: return build_average(pool, instance, terms);
        case ObjectiveKind::Utility:
            return build_utility(pool, instance, terms, spec.utilities);
        case ObjectiveKind::MaxTail: return build_maxtail(pool, instance, terms);
    }
    throw std::invalid_argument("unknown objective kind");
}

}  // namespace ncsynth
