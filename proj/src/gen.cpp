// gen.cpp - Layered random networks, Yen-style path candidates, enumeration.
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

#include "ncsynth/gen.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ncsynth/rng.hpp"

namespace ncsynth {

namespace {

// BFS shortest path by hop count with smallest-index parent preference;
// nodes/edges in `banned_*` are skipped. Returns an empty vector when the
// target is unreachable.
std::vector<int> bfs_path(const std::vector<std::vector<int>>& adjacency,
                          int source, int target,
                          const std::set<int>& banned_nodes,
                          const std::set<std::pair<int, int>>& banned_edges) {
    if (banned_nodes.count(source) || banned_nodes.count(target)) return {};
    std::vector<int> parent(adjacency.size(), -2);
    parent[source] = -1;
    std::queue<int> q;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (u == target) break;
        // Neighbors in ascending index order keep the search deterministic.
        for (int v : adjacency[u]) {
            if (parent[v] != -2 || banned_nodes.count(v)) continue;
            if (banned_edges.count({u, v})) continue;
            parent[v] = u;
            q.push(v);
        }
    }
    if (parent[target] == -2) return {};
    std::vector<int> path;
    for (int v = target; v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

std::vector<std::vector<int>> k_shortest_paths(
    const std::vector<std::vector<int>>& adjacency, int source, int target,
    int k) {
    std::vector<std::vector<int>> found;
    auto first = bfs_path(adjacency, source, target, {}, {});
    if (first.empty()) return found;
    found.push_back(first);

    // Candidates ordered by (length, lexicographic path) for determinism.
    std::set<std::pair<std::size_t, std::vector<int>>> candidates;
    while (static_cast<int>(found.size()) < k) {
        const std::vector<int>& prev = found.back();
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
            std::vector<int> root(prev.begin(), prev.begin() + i + 1);
            std::set<std::pair<int, int>> banned_edges;
            for (const auto& p : found) {
                if (p.size() > i + 1 &&
                    std::equal(root.begin(), root.end(), p.begin()))
                    banned_edges.insert({p[i], p[i + 1]});
            }
            std::set<int> banned_nodes(root.begin(), root.end() - 1);
            auto spur = bfs_path(adjacency, prev[i], target, banned_nodes,
                                 banned_edges);
            if (spur.empty()) continue;
            root.insert(root.end(), spur.begin() + 1, spur.end());
            candidates.insert({root.size(), std::move(root)});
        }
        bool added = false;
        while (!candidates.empty()) {
            auto best = *candidates.begin();
            candidates.erase(candidates.begin());
            if (std::find(found.begin(), found.end(), best.second) == found.end()) {
                found.push_back(std::move(best.second));
                added = true;
                break;
            }
        }
        if (!added) break;
    }
    return found;
}

namespace {

struct PortGraph {
    int ports = 0;
    std::vector<int> layer_of;
    std::vector<std::vector<int>> adjacency;        // ascending neighbor index
    std::vector<std::vector<char>> reachable;       // [u][v]
};

PortGraph draw_port_graph(const GenSpec& spec, Rng& rng) {
    PortGraph g;
    int layers = spec.min_layers +
                 static_cast<int>(uniform_index(
                     rng, static_cast<std::uint64_t>(spec.max_layers - spec.min_layers + 1)));
    g.ports = spec.min_ports +
              static_cast<int>(uniform_index(
                  rng, static_cast<std::uint64_t>(spec.max_ports - spec.min_ports + 1)));
    layers = std::min(layers, g.ports);  // every layer needs a port

    g.layer_of.resize(g.ports);
    for (int p = 0; p < g.ports; ++p)
        g.layer_of[p] = p < layers
                            ? p
                            : static_cast<int>(uniform_index(
                                  rng, static_cast<std::uint64_t>(layers)));

    std::vector<std::vector<int>> by_layer(layers);
    for (int p = 0; p < g.ports; ++p) by_layer[g.layer_of[p]].push_back(p);

    std::set<std::pair<int, int>> edges;
    for (int l = 0; l + 1 < layers; ++l) {
        const auto& cur = by_layer[l];
        const auto& next = by_layer[l + 1];
        // Spine: every port reaches the next layer and every next-layer port
        // is reachable.
        for (int u : cur)
            edges.insert({u, next[uniform_index(rng, next.size())]});
        for (int v : next)
            edges.insert({cur[uniform_index(rng, cur.size())], v});
        for (int u : cur)
            for (int v : next)
                if (uniform01(rng) < spec.edge_density) edges.insert({u, v});
    }
    // Skip-layer edges keep the graph feed-forward while giving flows
    // hop-count-diverse route alternatives.
    for (int l = 0; l + 2 < layers; ++l) {
        for (int u : by_layer[l])
            for (int v : by_layer[l + 2])
                if (uniform01(rng) < 0.5 * spec.edge_density) edges.insert({u, v});
    }

    g.adjacency.assign(g.ports, {});
    for (auto [u, v] : edges) g.adjacency[u].push_back(v);
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());

    g.reachable.assign(g.ports, std::vector<char>(g.ports, 0));
    for (int u = g.ports - 1; u >= 0; --u) {
        g.reachable[u][u] = 1;
        for (int v : g.adjacency[u])
            for (int w = 0; w < g.ports; ++w)
                if (g.reachable[v][w]) g.reachable[u][w] = 1;
    }
    return g;
}

std::string port_name(int p) { return "p" + std::to_string(p); }
std::string server_name(int p, int level) {
    return "p" + std::to_string(p) + "_k" + std::to_string(level);
}

}  // namespace

ProblemInstance generate(const GenSpec& spec) {
    if (spec.min_ports < 1 || spec.max_ports < spec.min_ports ||
        spec.min_flows < 1 || spec.max_flows < spec.min_flows ||
        spec.min_layers < 2 || spec.max_layers < spec.min_layers ||
        spec.paths_per_flow < 1 || spec.priority_classes < 1)
        throw ValidationError("invalid generator spec ranges");

    Rng rng(spec.seed);
    double rate_scale = 1.0;
    std::string last_error = "exhausted retries";
    for (int attempt = 0; attempt < 100; ++attempt) {
        PortGraph pg = draw_port_graph(spec, rng);

        ServerGraph graph;
        for (int p = 0; p < pg.ports; ++p) {
            for (int k = 0; k < spec.priority_classes; ++k) {
                Server s;
                s.id = server_name(p, k);
                s.port = port_name(p);
                s.priority_level = k;
                s.service.rate =
                    uniform_in(rng, spec.server_rate_min, spec.server_rate_max);
                s.service.latency =
                    uniform_in(rng, spec.server_latency_min, spec.server_latency_max);
                graph.servers.push_back(std::move(s));
            }
        }
        // Dense index of (port, level): p * classes + k by construction.
        for (int u = 0; u < pg.ports; ++u)
            for (int v : pg.adjacency[u])
                for (int k = 0; k < spec.priority_classes; ++k)
                    graph.edges.push_back({u * spec.priority_classes + k,
                                           v * spec.priority_classes + k});

        int nflows = spec.min_flows +
                     static_cast<int>(uniform_index(
                         rng, static_cast<std::uint64_t>(spec.max_flows - spec.min_flows + 1)));
        std::vector<Flow> flows;
        bool draw_failed = false;
        for (int i = 0; i < nflows; ++i) {
            // Source with at least one strictly-downstream reachable port;
            // prefer destinations two or more layers away so that route
            // alternatives exist.
            int src = -1, dst = -1;
            for (int tries = 0; tries < 200 && src < 0; ++tries) {
                int cand = static_cast<int>(uniform_index(rng, pg.ports));
                std::vector<int> targets, far_targets;
                for (int w = 0; w < pg.ports; ++w) {
                    if (w == cand || !pg.reachable[cand][w]) continue;
                    targets.push_back(w);
                    if (pg.layer_of[w] >= pg.layer_of[cand] + 2) far_targets.push_back(w);
                }
                if (targets.empty()) continue;
                src = cand;
                const auto& pick = !far_targets.empty() && uniform01(rng) < 0.8
                                       ? far_targets
                                       : targets;
                dst = pick[uniform_index(rng, pick.size())];
            }
            if (src < 0) {
                draw_failed = true;
                break;
            }

            Flow f;
            f.id = "f" + std::to_string(i);
            f.arrival.rate =
                uniform_in(rng, spec.flow_rate_min, spec.flow_rate_max) * rate_scale;
            f.arrival.burst = uniform_in(rng, spec.flow_burst_min, spec.flow_burst_max);
            f.source = server_name(src, 0);

            std::vector<int> dests{dst};
            if (spec.multicast_fraction > 0.0 &&
                uniform01(rng) < spec.multicast_fraction) {
                std::vector<int> extra;
                for (int w = 0; w < pg.ports; ++w)
                    if (w != src && w != dst && pg.reachable[src][w]) extra.push_back(w);
                if (!extra.empty())
                    dests.push_back(extra[uniform_index(rng, extra.size())]);
            }

            // Equal alternative counts across destinations.
            std::vector<std::vector<std::vector<int>>> per_dest;
            std::size_t alt_count = static_cast<std::size_t>(spec.paths_per_flow);
            for (int d : dests) {
                auto paths = k_shortest_paths(pg.adjacency, src, d, spec.paths_per_flow);
                alt_count = std::min(alt_count, paths.size());
                per_dest.push_back(std::move(paths));
            }
            if (alt_count == 0) {
                draw_failed = true;
                break;
            }
            for (std::size_t d = 0; d < dests.size(); ++d) {
                f.destinations.push_back(server_name(dests[d], 0));
                for (std::size_t j = 0; j < alt_count; ++j) {
                    std::vector<std::string> path;
                    for (int p : per_dest[d][j]) path.push_back(server_name(p, 0));
                    f.candidate_paths.push_back(std::move(path));
                }
            }
            for (int k = 0; k < spec.priority_classes; ++k)
                f.allowed_priorities.push_back(k);
            if (spec.deadline_fraction > 0.0 &&
                uniform01(rng) < spec.deadline_fraction) {
                // Loose requirement around the crosstraffic-free latency scale.
                f.deadline = uniform_in(rng, 0.05, 0.5);
            }
            flows.push_back(std::move(f));
        }
        if (draw_failed) {
            rate_scale *= 0.85;
            continue;
        }

        try {
            return make_instance(std::move(graph), std::move(flows),
                                 spec.utilization_cap);
        } catch (const ValidationError& e) {
            last_error = e.what();
            rate_scale *= 0.85;
        }
    }
    throw ValidationError("generate: no feasible instance after 100 draws (" +
                          last_error + ")");
}

InstanceStats stats(const ProblemInstance& instance) {
    InstanceStats st;
    st.servers = static_cast<int>(instance.graph.servers.size());
    st.flows = static_cast<int>(instance.flows.size());
    st.virtual_flows = static_cast<int>(instance.virtual_flows.size());
    for (const VarBlock& b : instance.blocks) {
        int alternatives = 0;
        for (int v = b.first_var; v < b.first_var + b.var_count; ++v)
            alternatives = std::max(alternatives, instance.var_alternative[v] + 1);
        st.log10_path_combinations += std::log10(static_cast<double>(alternatives));
        st.log10_path_priority_combinations +=
            std::log10(static_cast<double>(b.var_count));
    }
    return st;
}

namespace {

DatasetStats::Row make_row(std::vector<double> values) {
    DatasetStats::Row row;
    if (values.empty()) return row;
    std::sort(values.begin(), values.end());
    row.min = values.front();
    row.max = values.back();
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    std::size_t n = values.size();
    row.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    return row;
}

}  // namespace

DatasetStats aggregate_stats(const std::vector<InstanceStats>& rows) {
    DatasetStats out;
    auto gather = [&](auto getter) {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(getter(r));
        return make_row(std::move(v));
    };
    out.servers = gather([](const InstanceStats& r) { return double(r.servers); });
    out.flows = gather([](const InstanceStats& r) { return double(r.flows); });
    out.virtual_flows =
        gather([](const InstanceStats& r) { return double(r.virtual_flows); });
    out.log10_path_combinations =
        gather([](const InstanceStats& r) { return r.log10_path_combinations; });
    out.log10_path_priority_combinations = gather(
        [](const InstanceStats& r) { return r.log10_path_priority_combinations; });
    return out;
}

namespace {

struct ComboBest {
    double objective = std::numeric_limits<double>::infinity();
    unsigned long long index = 0;
    std::vector<int> choice;
    bool valid = false;
};

}  // namespace

EnumerateResult enumerate_all(const ProblemInstance& instance,
                              CompiledAnalysis& analysis, unsigned long long limit,
                              int tasks, bool full_ranking) {
    EnumerateResult res;
    unsigned long long total = 1;
    for (const VarBlock& b : instance.blocks) {
        auto count = static_cast<unsigned long long>(b.var_count);
        if (total > limit / count)  // total * count would exceed limit
            throw std::invalid_argument(
                "enumerate: combination count exceeds limit " + std::to_string(limit));
        total *= count;
    }
    res.total_combinations = total;

    const int nflows = static_cast<int>(instance.flows.size());
    auto decode = [&](unsigned long long idx, std::vector<int>& choice) {
        for (int f = 0; f < nflows; ++f) {
            const VarBlock& b = instance.blocks[f];
            choice[f] = b.first_var +
                        static_cast<int>(idx % static_cast<unsigned long long>(b.var_count));
            idx /= static_cast<unsigned long long>(b.var_count);
        }
    };

    auto eval_combo = [&](unsigned long long idx, std::vector<int>& choice,
                          std::vector<double>& x, std::vector<double>& slots,
                          double* objective) -> bool {
        decode(idx, choice);
        std::fill(x.begin(), x.end(), 0.0);
        for (int v : choice) x[v] = 1.0;
        if (!capacity_feasible(instance, x, 1e-9)) return false;
        try {
            analysis.graph.forward_slots(x, slots);
        } catch (const StabilityViolation&) {
            return false;
        }
        for (int f = 0; f < nflows; ++f) {
            if (!instance.flows[f].deadline) continue;
            double d = slots[analysis.graph.output_slot(1 + f)];
            if (d > *instance.flows[f].deadline + 1e-9) return false;
        }
        *objective = slots[analysis.graph.output_slot(0)];
        return true;
    };

    if (full_ranking) tasks = 1;
    long feasible_count = 0;

#ifdef _OPENMP
    const int nthreads = std::max(1, tasks);
    std::vector<ComboBest> best_per_task(nthreads);
    #pragma omp parallel num_threads(nthreads) if (tasks > 1) reduction(+ : feasible_count)
    {
        const int tid = omp_get_thread_num();
        std::vector<int> choice(nflows);
        std::vector<double> x(instance.var_count), slots;
        ComboBest local;
        #pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(total); ++i) {
            double obj = 0.0;
            if (!eval_combo(static_cast<unsigned long long>(i), choice, x, slots, &obj))
                continue;
            ++feasible_count;
            if (!local.valid || obj < local.objective ||
                (obj == local.objective &&
                 static_cast<unsigned long long>(i) < local.index)) {
                local.valid = true;
                local.objective = obj;
                local.index = static_cast<unsigned long long>(i);
                local.choice = choice;
            }
            if (full_ranking) res.ranking.push_back({obj, choice});
        }
        best_per_task[tid] = std::move(local);
    }
    ComboBest best;
    for (const ComboBest& b : best_per_task) {
        if (!b.valid) continue;
        if (!best.valid || b.objective < best.objective ||
            (b.objective == best.objective && b.index < best.index))
            best = b;
    }
#else
    std::vector<int> choice(nflows);
    std::vector<double> x(instance.var_count), slots;
    ComboBest best;
    for (unsigned long long i = 0; i < total; ++i) {
        double obj = 0.0;
        if (!eval_combo(i, choice, x, slots, &obj)) continue;
        ++feasible_count;
        if (!best.valid || obj < best.objective ||
            (obj == best.objective && i < best.index)) {
            best.valid = true;
            best.objective = obj;
            best.index = i;
            best.choice = choice;
        }
        if (full_ranking) res.ranking.push_back({obj, choice});
    }
#endif

    res.feasible_count = feasible_count;
    if (best.valid) {
        res.found = true;
        res.objective = best.objective;
        res.best_choice = best.choice;
        res.best = one_hot(instance, best.choice);
    }
    if (full_ranking)
        std::stable_sort(res.ranking.begin(), res.ranking.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    return res;
}

}  // namespace ncsynth
