// ncsynth.cpp - Command-line interface: analyze, optimize, generate, bench,
// gradcheck.
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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ncsynth/adgraph.hpp"
#include "ncsynth/gen.hpp"
#include "ncsynth/io.hpp"
#include "ncsynth/optim.hpp"
#include "ncsynth/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace ncsynth;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternal = 3;

struct CommonOptions {
    std::string objective = "average";
    std::string utility_family = "linear";
    double utility_scale = 1.0;
    double utility_offset = 0.0;
    double lambda_cap = -1.0;
    double lambda_deadline = -1.0;
    std::uint64_t seed = 0;
    int budget = 500;
    int iterations = 500;
    double gap_tolerance = 1e-6;
    int tasks = 1;
    double rho = -1.0;  // <0: keep the instance file's value
    bool derive_priority_service = false;
};

ObjectiveSpec make_objective_spec(const CommonOptions& o) {
    ObjectiveSpec spec;
    if (o.objective == "average") {
        spec.kind = ObjectiveKind::Average;
    } else if (o.objective == "utility") {
        spec.kind = ObjectiveKind::Utility;
        UtilityDescriptor u;
        u.family = o.utility_family == "logistic"
                       ? UtilityDescriptor::Family::Logistic
                       : UtilityDescriptor::Family::LinearClamp;
        u.scale = o.utility_scale;
        u.offset = o.utility_offset;
        spec.utilities = {u};
    } else if (o.objective == "max-tail") {
        spec.kind = ObjectiveKind::MaxTail;
    } else {
        throw CLI::ValidationError("--objective",
                                   "unknown objective '" + o.objective + "'");
    }
    spec.lambda_cap = o.lambda_cap;
    spec.lambda_deadline = o.lambda_deadline;
    return spec;
}

OptimOptions make_optim_options(const CommonOptions& o) {
    OptimOptions opts;
    opts.max_iterations = o.iterations;
    opts.gap_tolerance = o.gap_tolerance;
    opts.budget = o.budget;
    opts.tasks = o.tasks;
    return opts;
}

ProblemInstance load_instance(const std::string& path, const CommonOptions& o) {
    ProblemInstance inst = load_instance_file(path);
    if (o.rho > 0.0) inst.utilization_cap = o.rho;
    return inst;
}

Json options_echo(const CommonOptions& o, const std::string& method) {
    return Json{{"method", method},
                {"objective", o.objective},
                {"utility_family", o.utility_family},
                {"utility_scale", o.utility_scale},
                {"utility_offset", o.utility_offset},
                {"lambda_cap", o.lambda_cap},
                {"lambda_deadline", o.lambda_deadline},
                {"budget", o.budget},
                {"iterations", o.iterations},
                {"gap_tolerance", o.gap_tolerance},
                {"tasks", o.tasks},
                {"rho", o.rho},
                {"derive_priority_service", o.derive_priority_service}};
}

void add_common_flags(CLI::App* cmd, CommonOptions& o, bool with_optim) {
    cmd->add_option("--objective", o.objective,
                    "Objective kind: average, utility, max-tail")
        ->check(CLI::IsMember({"average", "utility", "max-tail"}));
    cmd->add_option("--utility-family", o.utility_family,
                    "Utility family for --objective utility: linear, logistic")
        ->check(CLI::IsMember({"linear", "logistic"}));
    cmd->add_option("--utility-scale", o.utility_scale,
                    "Utility slope (linear) or steepness (logistic)");
    cmd->add_option("--utility-offset", o.utility_offset,
                    "Utility offset (linear) or midpoint (logistic)");
    cmd->add_option("--rho", o.rho,
                    "Utilization cap override in (0,1]; default from the file");
    cmd->add_option("--tasks", o.tasks, "Evaluation parallelism")->check(CLI::PositiveNumber);
    cmd->add_flag("--derive-priority-service", o.derive_priority_service,
                  "Derive level-k service from the port's level-0 curve");
    if (with_optim) {
        cmd->add_option("--seed", o.seed, "Random seed");
        cmd->add_option("--budget", o.budget, "Objective evaluation budget for heuristics");
        cmd->add_option("--iterations", o.iterations, "Frank-Wolfe iteration cap");
        cmd->add_option("--gap-tol", o.gap_tolerance, "Frank-Wolfe gap stopping tolerance");
        cmd->add_option("--lambda-cap", o.lambda_cap,
                        "Capacity penalty weight (negative = auto)");
        cmd->add_option("--lambda-deadline", o.lambda_deadline,
                        "Deadline penalty weight (negative = auto)");
    }
}

SfaOptions make_sfa_options(const CommonOptions& o) {
    SfaOptions s;
    s.derive_priority_service = o.derive_priority_service;
    return s;
}

int cmd_analyze(const std::string& instance_path, const std::string& assignment_path,
                const CommonOptions& o) {
    ProblemInstance inst = load_instance(instance_path, o);
    CompiledAnalysis analysis =
        compile_analysis(inst, make_objective_spec(o), make_sfa_options(o));

    Assignment x;
    if (!assignment_path.empty()) {
        x = choices_to_assignment(inst, Json::parse(read_text_file(assignment_path)));
    } else {
        for (const VarBlock& b : inst.blocks) {
            if (b.var_count != 1)
                throw ParseError(
                    "instance has multiple alternatives; pass --assignment");
        }
        std::vector<int> chosen;
        for (const VarBlock& b : inst.blocks) chosen.push_back(b.first_var);
        x = one_hot(inst, chosen);
    }

    PointEval pe = evaluate_point(inst, analysis, x);
    if (!pe.evaluable) {
        std::cerr << "infeasible assignment: stability violated\n";
        return kExitInfeasible;
    }
    auto chosen = argmax_choice(inst, x);
    std::printf("%-16s %11s %8s %14s\n", "flow", "alternative", "priority",
                "delay bound");
    for (std::size_t f = 0; f < inst.flows.size(); ++f) {
        std::printf("%-16s %11d %8d %14.9g\n", inst.flows[f].id.c_str(),
                    inst.var_alternative[chosen[f]], inst.var_priority[chosen[f]],
                    pe.flow_delays[f]);
    }
    std::printf("objective (%s): %.9g\n", o.objective.c_str(), pe.objective);
    if (!pe.feasible) {
        std::cerr << "assignment violates capacity or deadline constraints\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_optimize(const std::string& instance_path, const std::string& method,
                 const std::string& out_path, bool timing, const CommonOptions& o) {
    ProblemInstance inst = load_instance(instance_path, o);
    CompiledAnalysis analysis =
        compile_analysis(inst, make_objective_spec(o), make_sfa_options(o));
    OptimizerReport report =
        run_method(inst, analysis, method, make_optim_options(o), o.seed);

    std::printf("method:      %s\n", report.method.c_str());
    std::printf("seed:        %llu\n", static_cast<unsigned long long>(report.seed));
    std::printf("feasible:    %s\n", report.feasible ? "yes" : "no");
    if (std::isfinite(report.objective))
        std::printf("objective:   %.9g\n", report.objective);
    std::printf("evaluations: %ld\n", report.evaluation_count);
    std::printf("wall clock:  %.3f s\n", report.wall_clock_seconds);
    if (!report.diagnostic.empty())
        std::printf("diagnostic:  %s\n", report.diagnostic.c_str());

    if (!out_path.empty()) {
        Json doc = result_to_json(report, inst, options_echo(o, method), timing);
        save_result_file(doc, out_path);
        std::printf("result:      %s\n", out_path.c_str());
    }
    return report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_generate(const std::string& out_path, const GenSpec& spec, bool print_stats) {
    ProblemInstance inst = generate(spec);
    save_instance_file(inst, out_path);
    auto st = stats(inst);
    std::printf("wrote %s\n", out_path.c_str());
    if (print_stats) {
        std::printf("%-10s %8s %8s %14s %18s\n", "servers", "flows", "vflows",
                    "log10(paths)", "log10(paths x prio)");
        std::printf("%-10d %8d %8d %14.3f %18.3f\n", st.servers, st.flows,
                    st.virtual_flows, st.log10_path_combinations,
                    st.log10_path_priority_combinations);
    }
    return kExitOk;
}

struct BenchRow {
    std::string instance;
    std::uint64_t seed = 0;
    std::string method;
    bool feasible = false;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double gap_sp = std::numeric_limits<double>::quiet_NaN();
    double gap_best = std::numeric_limits<double>::quiet_NaN();
    double gap_opt = std::numeric_limits<double>::quiet_NaN();
    bool opt_found = false;
    double wall_clock = 0.0;
    std::string error;
};

int cmd_bench(const std::string& dir, std::vector<std::string> methods,
              std::vector<std::uint64_t> seeds, unsigned long long limit,
              const std::string& out_csv, const CommonOptions& o) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParseError("no .json instances in '" + dir + "'");
    if (methods.empty()) methods = known_methods();
    for (const auto& m : methods)
        if (!is_known_method(m)) throw ParseError("unknown method '" + m + "'");
    if (std::find(methods.begin(), methods.end(), "sp-hops") == methods.end())
        methods.push_back("sp-hops");  // the gap baseline always runs
    if (seeds.empty()) seeds = {1};

    struct PerInstance {
        std::vector<BenchRow> rows;
        bool enumerable = false;
        double optimum = std::numeric_limits<double>::quiet_NaN();
        std::string error;
    };
    std::vector<PerInstance> results(files.size());

    // Independent pipelines; parallel across instances.
    #pragma omp parallel for schedule(dynamic) num_threads(std::max(1, o.tasks)) if (o.tasks > 1)
    for (long long fi = 0; fi < static_cast<long long>(files.size()); ++fi) {
        PerInstance& pi = results[fi];
        try {
            ProblemInstance inst = load_instance(files[fi], o);
            CompiledAnalysis analysis =
                compile_analysis(inst, make_objective_spec(o), make_sfa_options(o));

            unsigned long long combos = 1;
            bool small = true;
            for (const VarBlock& b : inst.blocks) {
                combos *= static_cast<unsigned long long>(b.var_count);
                if (combos > limit) {
                    small = false;
                    break;
                }
            }
            if (small) {
                auto en = enumerate_all(inst, analysis, limit, 1);
                if (en.found) {
                    pi.enumerable = true;
                    pi.optimum = en.objective;
                }
            }

            for (std::uint64_t seed : seeds) {
                std::vector<OptimizerReport> reports;
                for (const std::string& m : methods)
                    reports.push_back(
                        run_method(inst, analysis, m, make_optim_options(o), seed));
                std::vector<MethodGaps> gaps;
                std::string gap_error;
                try {
                    gaps = metrics(reports);
                } catch (const std::invalid_argument& e) {
                    gap_error = e.what();
                }
                for (std::size_t mi = 0; mi < reports.size(); ++mi) {
                    BenchRow row;
                    row.instance = files[fi];
                    row.seed = seed;
                    row.method = reports[mi].method;
                    row.feasible = reports[mi].feasible;
                    row.objective = reports[mi].objective;
                    row.wall_clock = reports[mi].wall_clock_seconds;
                    if (gap_error.empty()) {
                        row.gap_sp = gaps[mi].rel_gap_shortest_path;
                        row.gap_best = gaps[mi].rel_gap_best;
                    } else {
                        row.error = gap_error;
                    }
                    if (pi.enumerable && reports[mi].feasible) {
                        row.gap_opt = reports[mi].objective / pi.optimum - 1.0;
                        row.opt_found = reports[mi].objective <=
                                        pi.optimum * (1.0 + 1e-9) + 1e-12;
                    }
                    pi.rows.push_back(std::move(row));
                }
            }
        } catch (const std::exception& e) {
            pi.error = e.what();
        }
    }

    // Aggregate per method.
    struct Agg {
        int n = 0, feasible = 0, opt_known = 0, opt_found = 0;
        double sum_sp = 0.0, sum_best = 0.0, sum_opt = 0.0;
    };
    std::map<std::string, Agg> agg;
    std::vector<BenchRow> all_rows;
    int failed_instances = 0;
    for (const auto& pi : results) {
        if (!pi.error.empty()) {
            ++failed_instances;
            continue;
        }
        for (const auto& row : pi.rows) {
            all_rows.push_back(row);
            Agg& a = agg[row.method];
            ++a.n;
            if (row.feasible) ++a.feasible;
            if (std::isfinite(row.gap_sp)) a.sum_sp += row.gap_sp;
            if (std::isfinite(row.gap_best)) a.sum_best += row.gap_best;
            if (std::isfinite(row.gap_opt)) {
                a.sum_opt += row.gap_opt;
                ++a.opt_known;
                if (row.opt_found) ++a.opt_found;
            }
        }
    }

    std::printf("%-22s %6s %9s %12s %12s %12s %10s\n", "method", "runs", "feasible",
                "RelGapSP", "RelGapBest", "RelGapOpt", "OptFound");
    for (const auto& [method, a] : agg) {
        std::string opt_found = a.opt_known
                                    ? std::to_string(100.0 * a.opt_found / a.opt_known)
                                          .substr(0, 5) + "%"
                                    : "-";
        std::printf("%-22s %6d %9d %12.4f %12.4f %12s %10s\n", method.c_str(), a.n,
                    a.feasible, a.feasible ? a.sum_sp / a.feasible : 0.0,
                    a.feasible ? a.sum_best / a.feasible : 0.0,
                    a.opt_known ? std::to_string(a.sum_opt / a.opt_known).c_str() : "-",
                    opt_found.c_str());
    }
    if (failed_instances)
        std::printf("failed instances: %d of %zu\n", failed_instances, files.size());

    if (!out_csv.empty()) {
        std::string csv =
            "instance,seed,method,feasible,objective,rel_gap_sp,rel_gap_best,"
            "rel_gap_opt,opt_found,wall_clock_seconds,error\n";
        char buf[512];
        for (const auto& r : all_rows) {
            std::snprintf(buf, sizeof(buf), "%s,%llu,%s,%d,%.17g,%.17g,%.17g,%.17g,%d,%.6f,%s\n",
                          r.instance.c_str(), static_cast<unsigned long long>(r.seed),
                          r.method.c_str(), r.feasible ? 1 : 0, r.objective, r.gap_sp,
                          r.gap_best, r.gap_opt, r.opt_found ? 1 : 0, r.wall_clock,
                          r.error.c_str());
            csv += buf;
        }
        write_text_file(out_csv, csv);
        std::printf("rows: %s\n", out_csv.c_str());
    }
    return kExitOk;
}

int cmd_gradcheck(const std::string& instance_path, int points, const CommonOptions& o) {
    ProblemInstance inst = load_instance(instance_path, o);
    CompiledAnalysis analysis =
        compile_analysis(inst, make_objective_spec(o), make_sfa_options(o));
    const CompiledGraph& g = analysis.graph;
    std::vector<double> w(g.output_count(), 0.0);
    w[0] = 1.0;  // objective output only

    const double h = 1e-6;
    long checked = 0, skipped = 0, failures = 0;
    double max_rel = 0.0;

    auto branches_at = [&](std::span<const double> p, std::vector<std::uint8_t>& b) {
        std::vector<double> slots;
        g.forward_slots(p, slots);
        b.clear();
        const auto& instrs = g.instructions();
        for (std::size_t i = 0; i < instrs.size(); ++i) {
            switch (instrs[i].op) {
                case Op::Min: b.push_back(slots[instrs[i].a] <= slots[instrs[i].b]); break;
                case Op::Max: b.push_back(slots[instrs[i].a] >= slots[instrs[i].b]); break;
                case Op::Ramp: b.push_back(slots[instrs[i].a] >= 0.0); break;
                default: break;
            }
        }
    };

    for (int pt = 0; pt < points; ++pt) {
        Assignment x = random_start(inst, o.seed + static_cast<std::uint64_t>(pt));
        std::vector<double> grad;
        std::vector<std::uint8_t> base, up, down;
        try {
            grad = g.backward(x.p, w);
            branches_at(x.p, base);
        } catch (const StabilityViolation&) {
            ++skipped;
            continue;
        }
        std::vector<double> xp = x.p;
        for (std::size_t v = 0; v < xp.size(); ++v) {
            double fu, fd;
            try {
                xp[v] = x.p[v] + h;
                branches_at(xp, up);
                fu = g.forward(xp)[0];
                xp[v] = x.p[v] - h;
                branches_at(xp, down);
                fd = g.forward(xp)[0];
                xp[v] = x.p[v];
            } catch (const StabilityViolation&) {
                xp[v] = x.p[v];
                ++skipped;
                continue;
            }
            if (up != base || down != base) {
                ++skipped;  // a min/max/ramp branch flips inside the stencil
                continue;
            }
            double fd_grad = (fu - fd) / (2.0 * h);
            double denom = std::max({1.0, std::fabs(fd_grad), std::fabs(grad[v])});
            double rel = std::fabs(fd_grad - grad[v]) / denom;
            max_rel = std::max(max_rel, rel);
            ++checked;
            if (rel > 1e-5) ++failures;
        }
    }

    std::printf("checked coordinates: %ld\n", checked);
    std::printf("tie-skipped:         %ld\n", skipped);
    std::printf("max relative error:  %.3g\n", max_rel);
    std::printf("failures (>1e-5):    %ld\n", failures);
    bool pass = failures == 0;
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flow path and priority synthesis under worst-case delay bounds"};
    app.require_subcommand(1);

    CommonOptions common;

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Evaluate delay bounds at an assignment");
    std::string analyze_instance, analyze_assignment;
    analyze->add_option("instance", analyze_instance, "Instance file")->required();
    analyze->add_option("--assignment", analyze_assignment,
                        "Result/choices file fixing each flow's alternative");
    add_common_flags(analyze, common, false);

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Synthesize paths and priorities");
    std::string opt_instance, opt_method = "frank-wolfe", opt_out;
    bool opt_timing = false;
    optimize->add_option("instance", opt_instance, "Instance file")->required();
    optimize->add_option("--method", opt_method, "Optimization method")
        ->check(CLI::IsMember(known_methods()));
    optimize->add_option("--out", opt_out, "Write the result file here");
    optimize->add_flag("--timing", opt_timing,
                       "Record wall-clock time in the result file (volatile)");
    add_common_flags(optimize, common, true);

    // generate
    auto* generate_cmd = app.add_subcommand("generate", "Draw a random instance");
    GenSpec spec;
    std::string gen_out;
    bool gen_stats = false;
    generate_cmd->add_option("--out", gen_out, "Output instance file")->required();
    generate_cmd->add_option("--seed", spec.seed, "Generator seed");
    generate_cmd->add_option("--min-ports", spec.min_ports, "Minimum port count");
    generate_cmd->add_option("--max-ports", spec.max_ports, "Maximum port count");
    generate_cmd->add_option("--min-flows", spec.min_flows, "Minimum flow count");
    generate_cmd->add_option("--max-flows", spec.max_flows, "Maximum flow count");
    generate_cmd->add_option("--paths", spec.paths_per_flow, "Candidate paths per flow");
    generate_cmd->add_option("--priorities", spec.priority_classes, "Priority classes");
    generate_cmd->add_option("--density", spec.edge_density, "Extra edge density");
    generate_cmd->add_option("--multicast", spec.multicast_fraction,
                             "Fraction of flows drawn with two destinations");
    generate_cmd->add_option("--deadlines", spec.deadline_fraction,
                             "Fraction of flows given a deadline");
    generate_cmd->add_option("--rho", spec.utilization_cap, "Utilization cap");
    generate_cmd->add_flag("--stats", gen_stats, "Print the statistics row");

    // bench
    auto* bench = app.add_subcommand("bench", "Run methods over an instance directory");
    std::string bench_dir, bench_csv;
    std::vector<std::string> bench_methods;
    std::vector<std::uint64_t> bench_seeds;
    unsigned long long bench_limit = 1000000;
    bench->add_option("directory", bench_dir, "Directory of instance files")->required();
    bench->add_option("--methods", bench_methods, "Methods to run")->delimiter(',');
    bench->add_option("--seeds", bench_seeds, "Seeds (one full run each)")->delimiter(',');
    bench->add_option("--limit", bench_limit,
                      "Enumerate the optimum when combinations fit this limit");
    bench->add_option("--out", bench_csv, "Write per-run rows as CSV");
    add_common_flags(bench, common, true);

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck",
                                         "Compare reverse-mode gradients to finite differences");
    std::string gc_instance;
    int gc_points = 10;
    gradcheck->add_option("instance", gc_instance, "Instance file")->required();
    gradcheck->add_option("--points", gc_points, "Random evaluation points");
    add_common_flags(gradcheck, common, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) return cmd_analyze(analyze_instance, analyze_assignment, common);
        if (*optimize)
            return cmd_optimize(opt_instance, opt_method, opt_out, opt_timing, common);
        if (*generate_cmd) return cmd_generate(gen_out, spec, gen_stats);
        if (*bench)
            return cmd_bench(bench_dir, bench_methods, bench_seeds, bench_limit,
                             bench_csv, common);
        if (*gradcheck) return cmd_gradcheck(gc_instance, gc_points, common);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInputError;
}
