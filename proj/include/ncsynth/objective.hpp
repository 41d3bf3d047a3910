// objective.hpp - Scalar objectives and constraint penalties over delay terms.
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

#ifndef NCSYNTH_OBJECTIVE_HPP
#define NCSYNTH_OBJECTIVE_HPP

#include <vector>

#include "ncsynth/netmodel.hpp"
#include "ncsynth/sfa.hpp"

namespace ncsynth {

enum class ObjectiveKind { Average, Utility, MaxTail };

// Utility families mapping a flow's weighted delay bound into [0, 1].
// LinearClamp: clamp(scale * d + offset, 0, 1).
// Logistic: an algebraic sigmoid 1/2 + z / (2 * (1 + |z|)) with
// z = steepness * (d - midpoint); approaches a step at `midpoint` as the
// steepness grows. (The instruction set is {add, mul, div, min, max, ramp},
// so the S-curve is rational rather than exponential.)
struct UtilityDescriptor {
    enum class Family { LinearClamp, Logistic };
    Family family = Family::LinearClamp;
    double scale = 1.0;      // LinearClamp slope / Logistic steepness
    double offset = 0.0;     // LinearClamp offset / Logistic midpoint
};

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::Average;
    // Per-flow utility descriptors; a single entry broadcasts to all flows.
    std::vector<UtilityDescriptor> utilities;
    // Penalty weights; negative means "10x the objective value at the start
    // point", resolved once per run.
    double lambda_cap = -1.0;
    double lambda_deadline = -1.0;
};

// Per-flow weighted delay: sum over the flow's variables of
// p_var * (mean over destination branches of the branch delay bound).
// Terms must cover all virtual flows, indexed like instance.virtual_flows.
std::vector<ExprId> flow_weighted_delays(ExprPool& pool,
                                         const ProblemInstance& instance,
                                         const std::vector<DelayTerm>& terms);

// (1/|F|) * sum over flows of the weighted delay.
ExprId build_average(ExprPool& pool, const ProblemInstance& instance,
                     const std::vector<DelayTerm>& terms);

// sum over flows of U_i(weighted delay of flow i).
ExprId build_utility(ExprPool& pool, const ProblemInstance& instance,
                     const std::vector<DelayTerm>& terms,
                     const std::vector<UtilityDescriptor>& utilities);

// max over flows of the weighted delay (exact max nodes; the gradient flows
// to the first argmax).
ExprId build_maxtail(ExprPool& pool, const ProblemInstance& instance,
                     const std::vector<DelayTerm>& terms);

// lambda_cap * sum over servers of [load - rho * rate]^+ +
// lambda_deadline * sum over deadline flows of [weighted delay - deadline]^+.
// Zero exactly when the capacity and deadline constraints hold.
ExprId build_penalties(ExprPool& pool, const ProblemInstance& instance,
                       const std::vector<DelayTerm>& terms, double lambda_cap,
                       double lambda_deadline);

ExprId build_objective(ExprPool& pool, const ProblemInstance& instance,
                       const std::vector<DelayTerm>& terms,
                       const ObjectiveSpec& spec);

}  // namespace ncsynth

#endif  // NCSYNTH_OBJECTIVE_HPP
