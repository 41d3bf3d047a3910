// optim.hpp - Frank-Wolfe over the relaxed polytope, rounding, and baselines.
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

#ifndef NCSYNTH_OPTIM_HPP
#define NCSYNTH_OPTIM_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ncsynth/adgraph.hpp"
#include "ncsynth/netmodel.hpp"
#include "ncsynth/objective.hpp"

namespace ncsynth {

// Relaxed or integral selection vector, indexed by var id. Per-flow blocks
// sum to 1.
struct Assignment {
    std::vector<double> p;
};

struct OptimOptions {
    int max_iterations = 500;    // Frank-Wolfe iterations
    double gap_tolerance = 1e-6; // FW gap stopping threshold
    int budget = 500;            // objective evaluations for the heuristics
    int tasks = 1;               // evaluation parallelism
    bool record_iterates = false;  // keep every Frank-Wolfe iterate (tests)
};

struct OptimizerReport {
    std::string method;
    std::uint64_t seed = 0;
    Assignment best_relaxed;  // equals `rounded` for integral methods
    Assignment rounded;
    std::vector<double> trace;  // best-seen objective+penalty per iteration
    bool feasible = false;
    // Per-flow delay bounds at the rounded assignment (multicast flows:
    // mean over destination branches of the chosen alternative).
    std::vector<double> flow_delay_bounds;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double wall_clock_seconds = 0.0;
    long evaluation_count = 0;
    double max_block_sum_error = 0.0;  // over every visited iterate
    std::string diagnostic;
};

// Delay terms, objective expression and compiled evaluation graph for one
// (instance, objective) pair; shared by all optimization methods.
// Graph outputs: [objective, flow_0 weighted delay, ..., flow_{F-1}].
struct CompiledAnalysis {
    const ProblemInstance* instance = nullptr;
    ObjectiveSpec spec;
    ExprPool pool;
    std::vector<DelayTerm> terms;
    std::vector<ExprId> flow_delay_roots;
    ExprId objective_root = kNoExpr;
    CompiledGraph graph;
};

CompiledAnalysis compile_analysis(const ProblemInstance& instance,
                                  const ObjectiveSpec& spec,
                                  SfaOptions sfa_options = {});

// Objective + penalties for the relaxed methods. Appends to the analysis
// pool; graph outputs: [total, objective, flow_0, ..., flow_{F-1}].
struct CompiledTotal {
    double lambda_cap = 0.0;
    double lambda_deadline = 0.0;
    ExprId total_root = kNoExpr;
    CompiledGraph graph;
};

CompiledTotal with_penalties(CompiledAnalysis& analysis, double lambda_cap,
                             double lambda_deadline);

// Per-flow uniform simplex sample (normalized exponentials); deterministic
// per seed. Blocks of size one become exactly 1.
Assignment random_start(const ProblemInstance& instance, std::uint64_t seed);

// Linear minimization oracle over the product of simplices: one-hot at each
// block's minimal gradient coordinate, ties to the lowest var id.
Assignment lmo(std::span<const double> gradient, std::span<const VarBlock> blocks,
               int var_count);
Assignment lmo(std::span<const double> gradient, const ProblemInstance& instance);

// One-hot assignment from one chosen var per flow.
Assignment one_hot(const ProblemInstance& instance, std::span<const int> chosen_vars);
// Per-flow argmax of a relaxed assignment (ties to the lowest var id).
std::vector<int> argmax_choice(const ProblemInstance& instance, const Assignment& x);

// Generic Frank-Wolfe core over a product of simplices, used directly by
// tests with synthetic objectives. `f` evaluates value and gradient at x,
// returning false when the point is not evaluable (stability violation);
// the step is then halved toward the previous iterate, up to 20 times.
struct FwCoreResult {
    Assignment best;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    int iterations = 0;
    long evaluations = 0;
    double max_block_sum_error = 0.0;
    std::string diagnostic;
    std::vector<Assignment> iterates;  // filled when opts.record_iterates
};
using ValueGradFn =
    std::function<bool(std::span<const double>, double*, std::vector<double>*)>;
FwCoreResult frank_wolfe_core(std::span<const VarBlock> blocks, int var_count,
                              const ValueGradFn& f, const Assignment& start,
                              const OptimOptions& opts, bool momentum);

// Full pipeline: random start (greedy witness fallback when the start point
// is not evaluable), penalty-weight resolution, Frank-Wolfe, rounding with
// repair, verification.
OptimizerReport frank_wolfe(const ProblemInstance& instance,
                            CompiledAnalysis& analysis, const OptimOptions& opts,
                            std::uint64_t seed);
OptimizerReport frank_wolfe_momentum(const ProblemInstance& instance,
                                     CompiledAnalysis& analysis,
                                     const OptimOptions& opts, std::uint64_t seed);

// Per-flow argmax, then greedy repair of overloaded servers: repeatedly move
// the largest-rate flow using the most overloaded server to its
// smallest-delay alternative avoiding that server, at most |F| moves.
struct RoundResult {
    Assignment assignment;
    bool capacity_feasible = false;
};
RoundResult round_and_repair(const Assignment& x, const ProblemInstance& instance,
                             CompiledAnalysis& analysis);

OptimizerReport random_search(const ProblemInstance& instance,
                              CompiledAnalysis& analysis, int budget,
                              std::uint64_t seed);
OptimizerReport shortest_path_hops(const ProblemInstance& instance,
                                   CompiledAnalysis& analysis);
OptimizerReport shortest_path_mindelay(const ProblemInstance& instance,
                                       CompiledAnalysis& analysis);
OptimizerReport nelder_mead(const ProblemInstance& instance,
                            CompiledAnalysis& analysis, const OptimOptions& opts,
                            std::uint64_t seed);

// Generic Nelder-Mead over the blocks with clamp-and-rescale projection,
// exposed for tests with synthetic objectives.
using ValueFn = std::function<bool(std::span<const double>, double*)>;
FwCoreResult nelder_mead_core(std::span<const VarBlock> blocks, int var_count,
                              const ValueFn& f, const Assignment& start,
                              int budget, std::uint64_t seed);

// Dispatch by CLI method name: frank-wolfe, frank-wolfe-momentum, random,
// sp-hops, sp-mindelay, nelder-mead.
OptimizerReport run_method(const ProblemInstance& instance,
                           CompiledAnalysis& analysis, const std::string& method,
                           const OptimOptions& opts, std::uint64_t seed);
bool is_known_method(const std::string& method);
std::vector<std::string> known_methods();

// Relative gaps of each report against the hop-count shortest path baseline
// and against the best feasible objective among the reports.
struct MethodGaps {
    std::string method;
    double rel_gap_shortest_path = std::numeric_limits<double>::quiet_NaN();
    double rel_gap_best = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;
};
std::vector<MethodGaps> metrics(const std::vector<OptimizerReport>& reports);

// Evaluates objective and per-flow delays at an integral assignment and
// checks capacity plus deadlines. Used by reports and by the enumeration
// oracle.
struct PointEval {
    bool evaluable = false;  // stability held
    bool feasible = false;   // capacity (rho-capped) and deadlines
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> flow_delays;
};
PointEval evaluate_point(const ProblemInstance& instance, CompiledAnalysis& analysis,
                         const Assignment& x);

}  // namespace ncsynth

#endif  // NCSYNTH_OPTIM_HPP
