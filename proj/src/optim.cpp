// optim.cpp - Frank-Wolfe, rounding repair, and baseline heuristics.
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

#include "ncsynth/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ncsynth/rng.hpp"

namespace ncsynth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double block_sum_error(std::span<const VarBlock> blocks,
                       std::span<const double> p) {
    double worst = 0.0;
    for (const VarBlock& b : blocks) {
        double sum = 0.0;
        for (int v = b.first_var; v < b.first_var + b.var_count; ++v) sum += p[v];
        worst = std::max(worst, std::fabs(sum - 1.0));
    }
    return worst;
}

constexpr double kCapacitySlack = 1e-9;

}  // namespace

CompiledAnalysis compile_analysis(const ProblemInstance& instance,
                                  const ObjectiveSpec& spec,
                                  SfaOptions sfa_options) {
    CompiledAnalysis a;
    a.instance = &instance;
    a.spec = spec;
    a.terms = analyze_all(instance, a.pool, sfa_options);
    a.flow_delay_roots = flow_weighted_delays(a.pool, instance, a.terms);
    a.objective_root = build_objective(a.pool, instance, a.terms, spec);
    std::vector<ExprId> roots;
    roots.push_back(a.objective_root);
    roots.insert(roots.end(), a.flow_delay_roots.begin(), a.flow_delay_roots.end());
    a.graph = CompiledGraph::compile(a.pool, roots);
    return a;
}

CompiledTotal with_penalties(CompiledAnalysis& analysis, double lambda_cap,
                             double lambda_deadline) {
    CompiledTotal t;
    t.lambda_cap = lambda_cap;
    t.lambda_deadline = lambda_deadline;
    ExprId penalty = build_penalties(analysis.pool, *analysis.instance,
                                     analysis.terms, lambda_cap, lambda_deadline);
    t.total_root = analysis.pool.add(analysis.objective_root, penalty);
    std::vector<ExprId> roots;
    roots.push_back(t.total_root);
    roots.push_back(analysis.objective_root);
    roots.insert(roots.end(), analysis.flow_delay_roots.begin(),
                 analysis.flow_delay_roots.end());
    t.graph = CompiledGraph::compile(analysis.pool, roots);
    return t;
}

Assignment random_start(const ProblemInstance& instance, std::uint64_t seed) {
    Rng rng(seed);
    Assignment x;
    x.p.assign(instance.var_count, 0.0);
    for (const VarBlock& b : instance.blocks) {
        if (b.var_count == 1) {
            x.p[b.first_var] = 1.0;
            // Keep the stream aligned with the general case.
            (void)exponential(rng);
            continue;
        }
        double sum = 0.0;
        for (int v = b.first_var; v < b.first_var + b.var_count; ++v) {
            x.p[v] = exponential(rng);
            sum += x.p[v];
        }
        for (int v = b.first_var; v < b.first_var + b.var_count; ++v) x.p[v] /= sum;
    }
    return x;
}

Assignment lmo(std::span<const double> gradient, std::span<const VarBlock> blocks,
               int var_count) {
    Assignment s;
    s.p.assign(var_count, 0.0);
    for (const VarBlock& b : blocks) {
        int best = b.first_var;
        for (int v = b.first_var + 1; v < b.first_var + b.var_count; ++v)
            if (gradient[v] < gradient[best]) best = v;
        s.p[best] = 1.0;
    }
    return s;
}

Assignment lmo(std::span<const double> gradient, const ProblemInstance& instance) {
    return lmo(gradient, instance.blocks, instance.var_count);
}

Assignment one_hot(const ProblemInstance& instance, std::span<const int> chosen_vars) {
    Assignment x;
    x.p.assign(instance.var_count, 0.0);
    for (int v : chosen_vars) x.p[v] = 1.0;
    return x;
}

std::vector<int> argmax_choice(const ProblemInstance& instance, const Assignment& x) {
    std::vector<int> choice(instance.flows.size(), -1);
    for (const VarBlock& b : instance.blocks) {
        int best = b.first_var;
        for (int v = b.first_var + 1; v < b.first_var + b.var_count; ++v)
            if (x.p[v] > x.p[best]) best = v;
        choice[b.flow_index] = best;
    }
    return choice;
}

FwCoreResult frank_wolfe_core(std::span<const VarBlock> blocks, int var_count,
                              const ValueGradFn& f, const Assignment& start,
                              const OptimOptions& opts, bool momentum) {
    FwCoreResult res;
    Assignment x = start;
    res.max_block_sum_error = block_sum_error(blocks, x.p);

    double val = 0.0;
    std::vector<double> grad(var_count, 0.0);
    ++res.evaluations;
    if (!f(x.p, &val, &grad)) {
        res.diagnostic = "start point not evaluable";
        return res;
    }

    if (opts.record_iterates) res.iterates.push_back(x);
    std::vector<double> m;
    for (int k = 0; k < opts.max_iterations; ++k) {
        res.iterations = k + 1;
        if (val < res.best_value) {
            res.best_value = val;
            res.best = x;
        }
        res.trace.push_back(res.best_value);

        const std::vector<double>* dir = &grad;
        if (momentum) {
            double gamma = 2.0 / (k + 2.0);
            if (k == 0) {
                m = grad;
            } else {
                for (int i = 0; i < var_count; ++i)
                    m[i] = (1.0 - gamma) * m[i] + gamma * grad[i];
            }
            dir = &m;
        }

        Assignment s = lmo(*dir, blocks, var_count);
        double gap = 0.0;
        for (int i = 0; i < var_count; ++i) gap += grad[i] * (x.p[i] - s.p[i]);
        if (gap < opts.gap_tolerance) break;

        double delta = 1.0 / std::sqrt(k + 1.0);
        bool accepted = false;
        for (int halving = 0; halving <= 20 && !accepted; ++halving) {
            Assignment trial;
            trial.p.resize(var_count);
            for (int i = 0; i < var_count; ++i)
                trial.p[i] = x.p[i] + delta * (s.p[i] - x.p[i]);
            double tval = 0.0;
            std::vector<double> tgrad(var_count, 0.0);
            ++res.evaluations;
            if (f(trial.p, &tval, &tgrad)) {
                x = std::move(trial);
                val = tval;
                grad = std::move(tgrad);
                res.max_block_sum_error =
                    std::max(res.max_block_sum_error, block_sum_error(blocks, x.p));
                if (opts.record_iterates) res.iterates.push_back(x);
                accepted = true;
            } else {
                delta *= 0.5;
            }
        }
        if (!accepted) {
            res.diagnostic =
                "aborted: stability violation persisted after 20 step halvings";
            break;
        }
    }
    if (val < res.best_value) {
        res.best_value = val;
        res.best = x;
    }
    return res;
}

PointEval evaluate_point(const ProblemInstance& instance, CompiledAnalysis& analysis,
                         const Assignment& x) {
    PointEval pe;
    std::vector<double> out;
    try {
        out = analysis.graph.forward(x.p);
    } catch (const StabilityViolation&) {
        return pe;
    }
    pe.evaluable = true;
    pe.objective = out[0];
    pe.flow_delays.assign(out.begin() + 1, out.end());
    pe.feasible = capacity_feasible(instance, x.p, kCapacitySlack);
    if (pe.feasible) {
        for (std::size_t i = 0; i < instance.flows.size(); ++i) {
            if (instance.flows[i].deadline &&
                pe.flow_delays[i] > *instance.flows[i].deadline + kCapacitySlack) {
                pe.feasible = false;
                break;
            }
        }
    }
    return pe;
}

namespace {

// Fills the outcome-at-rounded fields shared by every method.
void finish_report(OptimizerReport& report, const ProblemInstance& instance,
                   CompiledAnalysis& analysis, Clock::time_point t0) {
    PointEval pe = evaluate_point(instance, analysis, report.rounded);
    report.feasible = pe.feasible;
    if (pe.evaluable) {
        report.objective = pe.objective;
        report.flow_delay_bounds = pe.flow_delays;
    }
    report.wall_clock_seconds = seconds_since(t0);
}

struct PreparedRun {
    Assignment start;
    CompiledTotal total;
    std::string note;
};

// Resolves penalty weights at the start point (10x the objective there when
// left on auto) and falls back to the greedy witness when the random start
// is not evaluable.
PreparedRun prepare_run(const ProblemInstance& instance, CompiledAnalysis& analysis,
                        std::uint64_t seed) {
    PreparedRun run;
    run.start = random_start(instance, seed);
    double f0 = 0.0;
    bool ok = true;
    try {
        f0 = analysis.graph.forward(run.start.p)[0];
    } catch (const StabilityViolation&) {
        ok = false;
    }
    if (!ok) {
        auto witness = capacity_witness(instance);
        if (!witness)
            throw ValidationError("no capacity-feasible witness for start point");
        run.start = one_hot(instance, *witness);
        f0 = analysis.graph.forward(run.start.p)[0];
        run.note = "random start not evaluable; started from greedy witness";
    }
    double auto_lambda = 10.0 * (f0 != 0.0 ? std::fabs(f0) : 1.0);
    double lcap = analysis.spec.lambda_cap >= 0.0 ? analysis.spec.lambda_cap
                                                  : auto_lambda;
    double ldl = analysis.spec.lambda_deadline >= 0.0 ? analysis.spec.lambda_deadline
                                                      : auto_lambda;
    run.total = with_penalties(analysis, lcap, ldl);
    return run;
}

OptimizerReport frank_wolfe_impl(const ProblemInstance& instance,
                                 CompiledAnalysis& analysis,
                                 const OptimOptions& opts, std::uint64_t seed,
                                 bool momentum) {
    auto t0 = Clock::now();
    OptimizerReport report;
    report.method = momentum ? "frank-wolfe-momentum" : "frank-wolfe";
    report.seed = seed;

    PreparedRun run = prepare_run(instance, analysis, seed);
    report.diagnostic = run.note;

    std::vector<double> slots, adj;
    std::vector<double> weights(run.total.graph.output_count(), 0.0);
    weights[0] = 1.0;
    ValueGradFn f = [&](std::span<const double> x, double* val,
                        std::vector<double>* grad) -> bool {
        try {
            run.total.graph.forward_slots(x, slots);
        } catch (const StabilityViolation&) {
            return false;
        }
        *val = slots[run.total.graph.output_slot(0)];
        if (grad) run.total.graph.backward_slots(slots, weights, *grad, adj);
        return true;
    };

    FwCoreResult core = frank_wolfe_core(instance.blocks, instance.var_count, f,
                                         run.start, opts, momentum);
    report.best_relaxed = core.best;
    report.trace = std::move(core.trace);
    report.evaluation_count = core.evaluations;
    report.max_block_sum_error = core.max_block_sum_error;
    if (!core.diagnostic.empty()) {
        if (!report.diagnostic.empty()) report.diagnostic += "; ";
        report.diagnostic += core.diagnostic;
    }

    RoundResult rounded = round_and_repair(core.best, instance, analysis);
    report.rounded = std::move(rounded.assignment);
    finish_report(report, instance, analysis, t0);
    return report;
}

}  // namespace

OptimizerReport frank_wolfe(const ProblemInstance& instance,
                            CompiledAnalysis& analysis, const OptimOptions& opts,
                            std::uint64_t seed) {
    return frank_wolfe_impl(instance, analysis, opts, seed, false);
}

OptimizerReport frank_wolfe_momentum(const ProblemInstance& instance,
                                     CompiledAnalysis& analysis,
                                     const OptimOptions& opts, std::uint64_t seed) {
    return frank_wolfe_impl(instance, analysis, opts, seed, true);
}

RoundResult round_and_repair(const Assignment& x, const ProblemInstance& instance,
                             CompiledAnalysis& analysis) {
    std::vector<int> choice = argmax_choice(instance, x);
    const int nflows = static_cast<int>(instance.flows.size());

    auto flow_delay_at = [&](const std::vector<int>& ch, int flow) -> double {
        try {
            auto out = analysis.graph.forward(one_hot(instance, ch).p);
            return out[1 + flow];
        } catch (const StabilityViolation&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    RoundResult result;
    for (int pass = 0; pass <= nflows; ++pass) {
        auto loads = server_loads(instance, one_hot(instance, choice).p);
        int worst_server = -1;
        double worst_excess = kCapacitySlack;
        for (std::size_t s = 0; s < loads.size(); ++s) {
            double cap =
                instance.utilization_cap * instance.graph.servers[s].service.rate;
            if (loads[s] - cap > worst_excess) {
                worst_excess = loads[s] - cap;
                worst_server = static_cast<int>(s);
            }
        }
        if (worst_server < 0) {
            result.capacity_feasible = true;
            break;
        }
        if (pass == nflows) break;  // move budget exhausted

        // Flows whose current choice crosses the overloaded server and that
        // own an alternative avoiding it; take the one contributing the most.
        auto crosses = [&](int var, int server) {
            const auto& servers = instance.var_servers[var];
            return std::binary_search(servers.begin(), servers.end(), server);
        };
        int move_flow = -1;
        for (int fidx = 0; fidx < nflows; ++fidx) {
            if (!crosses(choice[fidx], worst_server)) continue;
            const VarBlock& b = instance.blocks[fidx];
            bool has_alt = false;
            for (int v = b.first_var; v < b.first_var + b.var_count; ++v)
                if (!crosses(v, worst_server)) {
                    has_alt = true;
                    break;
                }
            if (!has_alt) continue;
            if (move_flow < 0 || instance.flows[fidx].arrival.rate >
                                     instance.flows[move_flow].arrival.rate)
                move_flow = fidx;
        }
        if (move_flow < 0) break;  // nothing can reduce the load

        const VarBlock& b = instance.blocks[move_flow];
        int best_var = -1;
        double best_delay = std::numeric_limits<double>::infinity();
        for (int v = b.first_var; v < b.first_var + b.var_count; ++v) {
            if (crosses(v, worst_server)) continue;
            std::vector<int> trial = choice;
            trial[move_flow] = v;
            double d = flow_delay_at(trial, move_flow);
            if (best_var < 0 || d < best_delay) {
                best_var = v;
                best_delay = d;
            }
        }
        choice[move_flow] = best_var;
    }
    result.assignment = one_hot(instance, choice);
    return result;
}

OptimizerReport random_search(const ProblemInstance& instance,
                              CompiledAnalysis& analysis, int budget,
                              std::uint64_t seed) {
    auto t0 = Clock::now();
    OptimizerReport report;
    report.method = "random";
    report.seed = seed;
    Rng rng(seed);

    std::vector<int> best_choice;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<int> choice(instance.flows.size());
    for (int i = 0; i < budget; ++i) {
        for (const VarBlock& b : instance.blocks)
            choice[b.flow_index] =
                b.first_var + static_cast<int>(uniform_index(rng, b.var_count));
        ++report.evaluation_count;
        Assignment x = one_hot(instance, choice);
        PointEval pe = evaluate_point(instance, analysis, x);
        if (pe.feasible && pe.objective < best_obj) {
            best_obj = pe.objective;
            best_choice = choice;
        }
    }
    if (best_choice.empty()) {
        // No feasible sample; report the last sample as infeasible outcome.
        report.rounded = one_hot(instance, choice);
        report.best_relaxed = report.rounded;
        report.diagnostic = "no feasible sample within budget";
        finish_report(report, instance, analysis, t0);
        report.feasible = false;
        return report;
    }
    report.rounded = one_hot(instance, best_choice);
    report.best_relaxed = report.rounded;
    finish_report(report, instance, analysis, t0);
    return report;
}

namespace {

OptimizerReport choice_report(const ProblemInstance& instance,
                              CompiledAnalysis& analysis, const std::string& method,
                              const std::vector<int>& choice, Clock::time_point t0) {
    OptimizerReport report;
    report.method = method;
    report.rounded = one_hot(instance, choice);
    report.best_relaxed = report.rounded;
    report.evaluation_count = 1;
    finish_report(report, instance, analysis, t0);
    return report;
}

}  // namespace

OptimizerReport shortest_path_hops(const ProblemInstance& instance,
                                   CompiledAnalysis& analysis) {
    auto t0 = Clock::now();
    // Hop count of a variable: mean path length over its destination
    // branches (a plain length for unicast). Ties go to the lowest var id,
    // which is the lowest alternative index and then the highest priority.
    std::vector<double> hops(instance.var_count, 0.0);
    std::vector<int> branches(instance.var_count, 0);
    for (const auto& vf : instance.virtual_flows) {
        hops[vf.var_id] += static_cast<double>(vf.path.size());
        ++branches[vf.var_id];
    }
    for (int v = 0; v < instance.var_count; ++v) hops[v] /= branches[v];

    std::vector<int> choice(instance.flows.size());
    for (const VarBlock& b : instance.blocks) {
        int best = b.first_var;
        for (int v = b.first_var + 1; v < b.first_var + b.var_count; ++v)
            if (hops[v] < hops[best]) best = v;
        choice[b.flow_index] = best;
    }
    return choice_report(instance, analysis, "sp-hops", choice, t0);
}

OptimizerReport shortest_path_mindelay(const ProblemInstance& instance,
                                       CompiledAnalysis& analysis) {
    auto t0 = Clock::now();
    // Cross-traffic-free proxy: sum of latencies plus burst over the minimum
    // rate along the path, averaged over destination branches.
    std::vector<double> proxy(instance.var_count, 0.0);
    std::vector<int> branches(instance.var_count, 0);
    for (const auto& vf : instance.virtual_flows) {
        double latency_sum = 0.0;
        double min_rate = std::numeric_limits<double>::infinity();
        for (int s : vf.path) {
            latency_sum += instance.graph.servers[s].service.latency;
            min_rate = std::min(min_rate, instance.graph.servers[s].service.rate);
        }
        double burst = instance.flows[vf.flow_index].arrival.burst;
        proxy[vf.var_id] += latency_sum + burst / min_rate;
        ++branches[vf.var_id];
    }
    for (int v = 0; v < instance.var_count; ++v) proxy[v] /= branches[v];

    std::vector<int> choice(instance.flows.size());
    for (const VarBlock& b : instance.blocks) {
        int best = b.first_var;
        for (int v = b.first_var + 1; v < b.first_var + b.var_count; ++v)
            if (proxy[v] < proxy[best]) best = v;
        choice[b.flow_index] = best;
    }
    return choice_report(instance, analysis, "sp-mindelay", choice, t0);
}

FwCoreResult nelder_mead_core(std::span<const VarBlock> blocks, int var_count,
                              const ValueFn& f, const Assignment& start,
                              int budget, std::uint64_t seed) {
    (void)seed;  // the start point carries all randomness
    FwCoreResult res;

    auto project = [&](std::vector<double>& p) {
        for (double& v : p) v = std::clamp(v, 0.0, 1.0);
        for (const VarBlock& b : blocks) {
            double sum = 0.0;
            for (int v = b.first_var; v < b.first_var + b.var_count; ++v) sum += p[v];
            if (sum <= 1e-12) {
                for (int v = b.first_var; v < b.first_var + b.var_count; ++v)
                    p[v] = 1.0 / b.var_count;
            } else {
                for (int v = b.first_var; v < b.first_var + b.var_count; ++v)
                    p[v] /= sum;
            }
        }
    };

    auto evaluate = [&](const std::vector<double>& p) -> double {
        ++res.evaluations;
        double val = 0.0;
        if (!f(p, &val)) return std::numeric_limits<double>::infinity();
        return val;
    };

    std::vector<int> free_vars;
    for (const VarBlock& b : blocks)
        if (b.var_count >= 2)
            for (int v = b.first_var; v < b.first_var + b.var_count; ++v)
                free_vars.push_back(v);

    Assignment x0 = start;
    project(x0.p);
    double f0 = evaluate(x0.p);
    res.best = x0;
    res.best_value = f0;
    res.trace.push_back(f0);
    if (free_vars.empty() || budget <= 1) return res;  // nothing to move

    const int n = static_cast<int>(free_vars.size());
    std::vector<std::vector<double>> xs(n + 1, x0.p);
    std::vector<double> fx(n + 1, f0);
    for (int i = 1; i <= n && res.evaluations < budget; ++i) {
        xs[i][free_vars[i - 1]] += 0.5;
        project(xs[i]);
        fx[i] = evaluate(xs[i]);
    }

    auto track_best = [&](const std::vector<double>& p, double v) {
        if (v < res.best_value) {
            res.best_value = v;
            res.best.p = p;
        }
        res.trace.push_back(res.best_value);
    };
    for (int i = 1; i <= n; ++i) track_best(xs[i], fx[i]);

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<int> order(n + 1);
    while (res.evaluations < budget) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fx[a] < fx[b]; });
        int best = order[0], worst = order[n], second_worst = order[n - 1];

        std::vector<double> centroid(var_count, 0.0);
        for (int i = 0; i <= n; ++i) {
            if (order[i] == worst) continue;
            for (int v = 0; v < var_count; ++v) centroid[v] += xs[order[i]][v];
        }
        for (int v = 0; v < var_count; ++v) centroid[v] /= n;

        auto blend = [&](const std::vector<double>& from, double scale) {
            std::vector<double> p(var_count);
            for (int v = 0; v < var_count; ++v)
                p[v] = centroid[v] + scale * (from[v] - centroid[v]);
            project(p);
            return p;
        };

        std::vector<double> xr = blend(xs[worst], -alpha);
        double fr = evaluate(xr);
        track_best(xr, fr);
        if (fr < fx[best]) {
            if (res.evaluations < budget) {
                std::vector<double> xe = blend(xs[worst], -alpha * gamma);
                double fe = evaluate(xe);
                track_best(xe, fe);
                if (fe < fr) {
                    xs[worst] = std::move(xe);
                    fx[worst] = fe;
                } else {
                    xs[worst] = std::move(xr);
                    fx[worst] = fr;
                }
            } else {
                xs[worst] = std::move(xr);
                fx[worst] = fr;
            }
        } else if (fr < fx[second_worst]) {
            xs[worst] = std::move(xr);
            fx[worst] = fr;
        } else {
            std::vector<double> xc = blend(xs[worst], rho);
            double fc = res.evaluations < budget
                            ? evaluate(xc)
                            : std::numeric_limits<double>::infinity();
            track_best(xc, fc);
            if (fc < fx[worst]) {
                xs[worst] = std::move(xc);
                fx[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (int i = 0; i <= n && res.evaluations < budget; ++i) {
                    if (i == best) continue;
                    for (int v = 0; v < var_count; ++v)
                        xs[i][v] = xs[best][v] + sigma * (xs[i][v] - xs[best][v]);
                    project(xs[i]);
                    fx[i] = evaluate(xs[i]);
                    track_best(xs[i], fx[i]);
                }
            }
        }
    }
    res.iterations = static_cast<int>(res.trace.size());
    return res;
}

OptimizerReport nelder_mead(const ProblemInstance& instance,
                            CompiledAnalysis& analysis, const OptimOptions& opts,
                            std::uint64_t seed) {
    auto t0 = Clock::now();
    OptimizerReport report;
    report.method = "nelder-mead";
    report.seed = seed;

    PreparedRun run = prepare_run(instance, analysis, seed);
    report.diagnostic = run.note;

    ValueFn f = [&](std::span<const double> x, double* val) -> bool {
        try {
            *val = run.total.graph.forward(x)[0];
            return true;
        } catch (const StabilityViolation&) {
            return false;
        }
    };
    FwCoreResult core = nelder_mead_core(instance.blocks, instance.var_count, f,
                                         run.start, opts.budget, seed);
    report.best_relaxed = core.best;
    report.trace = std::move(core.trace);
    report.evaluation_count = core.evaluations;
    report.max_block_sum_error = core.max_block_sum_error;

    RoundResult rounded = round_and_repair(core.best, instance, analysis);
    report.rounded = std::move(rounded.assignment);
    finish_report(report, instance, analysis, t0);
    return report;
}

std::vector<std::string> known_methods() {
    return {"frank-wolfe", "frank-wolfe-momentum", "random",
            "sp-hops",     "sp-mindelay",          "nelder-mead"};
}

bool is_known_method(const std::string& method) {
    auto ms = known_methods();
    return std::find(ms.begin(), ms.end(), method) != ms.end();
}

OptimizerReport run_method(const ProblemInstance& instance,
                           CompiledAnalysis& analysis, const std::string& method,
                           const OptimOptions& opts, std::uint64_t seed) {
    OptimizerReport report;
    if (method == "frank-wolfe") {
        report = frank_wolfe(instance, analysis, opts, seed);
    } else if (method == "frank-wolfe-momentum") {
        report = frank_wolfe_momentum(instance, analysis, opts, seed);
    } else if (method == "random") {
        report = random_search(instance, analysis, opts.budget, seed);
    } else if (method == "sp-hops") {
        report = shortest_path_hops(instance, analysis);
    } else if (method == "sp-mindelay") {
        report = shortest_path_mindelay(instance, analysis);
    } else if (method == "nelder-mead") {
        report = nelder_mead(instance, analysis, opts, seed);
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }
    report.seed = seed;
    return report;
}

std::vector<MethodGaps> metrics(const std::vector<OptimizerReport>& reports) {
    const OptimizerReport* baseline = nullptr;
    for (const auto& r : reports)
        if (r.method == "sp-hops") baseline = &r;
    if (!baseline || !baseline->feasible || !(baseline->objective > 0.0))
        throw std::invalid_argument("metrics: shortest-path baseline missing");

    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : reports)
        if (r.feasible) best = std::min(best, r.objective);
    if (!std::isfinite(best))
        throw std::invalid_argument("metrics: no feasible report");

    std::vector<MethodGaps> rows;
    rows.reserve(reports.size());
    for (const auto& r : reports) {
        MethodGaps g;
        g.method = r.method;
        g.feasible = r.feasible;
        if (r.feasible) {
            g.rel_gap_shortest_path = r.objective / baseline->objective - 1.0;
            g.rel_gap_best = r.objective / best - 1.0;
        }
        rows.push_back(g);
    }
    return rows;
}

}  // namespace ncsynth
