// evalbench.cpp - Delay-bound evaluation benchmark: re-derivation vs compiled
// tape, and serial vs parallel sub-tape evaluation.
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

#include <chrono>
#include <cstdio>
#include <vector>

#include "CLI11.hpp"

#include "ncsynth/adgraph.hpp"
#include "ncsynth/gen.hpp"
#include "ncsynth/optim.hpp"

using namespace ncsynth;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_per_call(int repetitions, F&& f) {
    auto t0 = Clock::now();
    for (int i = 0; i < repetitions; ++i) f();
    return std::chrono::duration<double>(Clock::now() - t0).count() /
           repetitions;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evaluation benchmark: precompiled tape vs re-derivation, serial vs parallel"};
    int flows = 120;
    int ports = 20;
    int paths = 3;
    int priorities = 2;
    int evals = 5;
    std::uint64_t seed = 1;
    std::vector<int> task_counts{1, 2, 4, 8};
    app.add_option("--flows", flows, "Flow count of the generated instance");
    app.add_option("--ports", ports, "Port count of the generated instance");
    app.add_option("--paths", paths, "Candidate paths per flow");
    app.add_option("--priorities", priorities, "Priority classes");
    app.add_option("--evals", evals, "Evaluations per measurement");
    app.add_option("--seed", seed, "Generator seed");
    app.add_option("--tasks", task_counts, "Task counts to compare")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    GenSpec spec;
    spec.min_ports = spec.max_ports = ports;
    spec.min_flows = spec.max_flows = flows;
    spec.paths_per_flow = paths;
    spec.priority_classes = priorities;
    spec.seed = seed;
    ProblemInstance inst = generate(spec);

    auto t0 = Clock::now();
    ExprPool pool;
    auto terms = analyze_all(inst, pool);
    double derive_s = std::chrono::duration<double>(Clock::now() - t0).count();

    std::vector<ExprId> roots;
    roots.reserve(terms.size());
    for (const auto& t : terms) roots.push_back(t.expr);

    t0 = Clock::now();
    auto graph = CompiledGraph::compile(pool, roots);
    double compile_s = std::chrono::duration<double>(Clock::now() - t0).count();

    std::printf("instance: %zu flows, %zu virtual flows, %d variables\n",
                inst.flows.size(), inst.virtual_flows.size(), inst.var_count);
    std::printf("expressions: %zu nodes, tape: %zu instructions, %zu outputs\n",
                pool.size(), graph.instruction_count(), graph.output_count());
    std::printf("analysis derivation: %.3f s, compilation: %.3f s\n\n", derive_s,
                compile_s);

    Assignment x = random_start(inst, seed);

    // The no-precompute path re-runs the analysis and interprets each term.
    double rederive_s = time_per_call(evals, [&] {
        ExprPool fresh;
        auto fresh_terms = analyze_all(inst, fresh);
        double sink = 0.0;
        for (const auto& t : fresh_terms) sink += fresh.interpret(t.expr, x.p);
        if (sink < 0.0) std::printf("impossible\n");
    });

    double forward_s = time_per_call(evals, [&] { (void)graph.forward(x.p); });

    std::printf("%-44s %12.6f s/eval\n", "re-derivation + interpretation", rederive_s);
    std::printf("%-44s %12.6f s/eval  (x%.1f)\n", "compiled forward (all outputs)",
                forward_s, rederive_s / forward_s);

    double serial_s = 0.0;
    for (int tasks : task_counts) {
        double t = time_per_call(evals, [&] { (void)graph.eval_parallel(x.p, tasks); });
        if (tasks == 1) serial_s = t;
        std::printf("eval_parallel values+gradients, %2d task(s)   %12.6f s/eval  (x%.2f vs serial)\n",
                    tasks, t, serial_s > 0.0 ? serial_s / t : 1.0);
    }
    return 0;
}
