// netmodel.cpp - Instance expansion, validation, and capacity witness.
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

#include "ncsynth/netmodel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace ncsynth {

namespace {

std::string port_level_key(const std::string& port, int level) {
    return port + '\x1f' + std::to_string(level);
}

}  // namespace

int ServerGraph::index_of(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? -1 : it->second;
}

int ServerGraph::server_at(const std::string& port, int level) const {
    auto it = by_port_level_.find(port_level_key(port, level));
    return it == by_port_level_.end() ? -1 : it->second;
}

bool ServerGraph::has_edge(int from, int to) const {
    return edge_set_.count((static_cast<std::uint64_t>(from) << 32) |
                           static_cast<std::uint32_t>(to)) > 0;
}

void ServerGraph::rebuild_lookup() {
    by_id_.clear();
    by_port_level_.clear();
    edge_set_.clear();
    for (int i = 0; i < static_cast<int>(servers.size()); ++i) {
        const Server& s = servers[i];
        if (!by_id_.emplace(s.id, i).second)
            throw ValidationError("duplicate server id '" + s.id + "'");
        by_port_level_.emplace(port_level_key(s.port, s.priority_level), i);
    }
    for (auto [from, to] : edges) {
        edge_set_.insert((static_cast<std::uint64_t>(from) << 32) |
                         static_cast<std::uint32_t>(to));
    }
}

namespace {

// Maps one candidate path onto the servers of priority level k, checking that
// every (port, k) server exists and consecutive servers are connected.
std::vector<int> map_path_to_level(const Flow& flow,
                                   const std::vector<std::string>& path,
                                   int level, const ServerGraph& graph) {
    std::vector<int> mapped;
    mapped.reserve(path.size());
    for (const std::string& id : path) {
        int base = graph.index_of(id);
        if (base < 0)
            throw ValidationError("flow '" + flow.id + "': path references unknown server '" +
                                  id + "'");
        int at_level = graph.server_at(graph.servers[base].port, level);
        if (at_level < 0)
            throw ValidationError("flow '" + flow.id + "': priority level " +
                                  std::to_string(level) + " absent from graph at port '" +
                                  graph.servers[base].port + "'");
        mapped.push_back(at_level);
    }
    for (std::size_t i = 1; i < mapped.size(); ++i) {
        if (!graph.has_edge(mapped[i - 1], mapped[i]))
            throw ValidationError("flow '" + flow.id + "': path not found in graph: no edge " +
                                  graph.servers[mapped[i - 1]].id + " -> " +
                                  graph.servers[mapped[i]].id + " at priority level " +
                                  std::to_string(level));
    }
    return mapped;
}

// Groups a flow's candidate paths by their final server (the destination) and
// checks every destination gets the same number of alternatives.
std::vector<std::vector<const std::vector<std::string>*>> group_paths(
    const Flow& flow) {
    if (flow.destinations.empty())
        throw ValidationError("flow '" + flow.id + "': no destinations");
    if (flow.candidate_paths.empty())
        throw ValidationError("flow '" + flow.id + "': no candidate paths");
    std::vector<std::vector<const std::vector<std::string>*>> groups(
        flow.destinations.size());
    for (const auto& path : flow.candidate_paths) {
        if (path.empty())
            throw ValidationError("flow '" + flow.id + "': empty candidate path");
        if (path.front() != flow.source)
            throw ValidationError("flow '" + flow.id + "': candidate path does not start at source '" +
                                  flow.source + "'");
        auto it = std::find(flow.destinations.begin(), flow.destinations.end(),
                            path.back());
        if (it == flow.destinations.end())
            throw ValidationError("flow '" + flow.id + "': candidate path ends at '" + path.back() +
                                  "' which is not a destination");
        groups[it - flow.destinations.begin()].push_back(&path);
    }
    std::size_t alt_count = groups[0].size();
    for (std::size_t d = 0; d < groups.size(); ++d) {
        if (groups[d].empty())
            throw ValidationError("flow '" + flow.id + "': no path to destination '" +
                                  flow.destinations[d] + "'");
        if (groups[d].size() != alt_count)
            throw ValidationError("flow '" + flow.id +
                                  "': destinations have differing numbers of candidate paths");
    }
    // Duplicate alternatives within one destination are rejected.
    for (std::size_t d = 0; d < groups.size(); ++d) {
        std::set<std::vector<std::string>> seen;
        for (const auto* p : groups[d]) {
            if (!seen.insert(*p).second)
                throw ValidationError("flow '" + flow.id + "': duplicate candidate path");
        }
    }
    return groups;
}

std::vector<int> sorted_priorities(const Flow& flow) {
    if (flow.allowed_priorities.empty())
        throw ValidationError("flow '" + flow.id + "': no allowed priorities");
    std::vector<int> ks = flow.allowed_priorities;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

std::vector<VirtualFlow> expand_one(const Flow& flow, int flow_index,
                                    const ServerGraph& graph, int first_var) {
    auto groups = group_paths(flow);
    auto ks = sorted_priorities(flow);
    std::vector<VirtualFlow> out;
    int var = first_var;
    for (std::size_t j = 0; j < groups[0].size(); ++j) {
        for (int k : ks) {
            for (std::size_t d = 0; d < groups.size(); ++d) {
                VirtualFlow vf;
                vf.flow_index = flow_index;
                vf.alternative = static_cast<int>(j);
                vf.priority = k;
                vf.destination = static_cast<int>(d);
                vf.var_id = var;
                vf.path = map_path_to_level(flow, *groups[d][j], k, graph);
                out.push_back(std::move(vf));
            }
            ++var;
        }
    }
    return out;
}

}  // namespace

std::vector<VirtualFlow> multicast_to_unicast(const Flow& flow, int flow_index,
                                              const ServerGraph& graph,
                                              int first_var) {
    if (flow.destinations.size() < 2)
        throw ValidationError("flow '" + flow.id + "' is not multicast");
    return expand_one(flow, flow_index, graph, first_var);
}

std::vector<VirtualFlow> expand_virtual_flows(const std::vector<Flow>& flows,
                                              const ServerGraph& graph) {
    std::vector<VirtualFlow> out;
    int next_var = 0;
    for (int i = 0; i < static_cast<int>(flows.size()); ++i) {
        auto vfs = expand_one(flows[i], i, graph, next_var);
        for (const auto& vf : vfs) next_var = std::max(next_var, vf.var_id + 1);
        out.insert(out.end(), std::make_move_iterator(vfs.begin()),
                   std::make_move_iterator(vfs.end()));
    }
    return out;
}

void ProblemInstance::finalize() {
    var_count = 0;
    for (const auto& vf : virtual_flows) var_count = std::max(var_count, vf.var_id + 1);

    var_flow.assign(var_count, -1);
    var_alternative.assign(var_count, -1);
    var_priority.assign(var_count, -1);
    vfs_of_var.assign(var_count, {});
    for (int i = 0; i < static_cast<int>(virtual_flows.size()); ++i) {
        const VirtualFlow& vf = virtual_flows[i];
        var_flow[vf.var_id] = vf.flow_index;
        var_alternative[vf.var_id] = vf.alternative;
        var_priority[vf.var_id] = vf.priority;
        vfs_of_var[vf.var_id].push_back(i);
    }

    blocks.assign(flows.size(), VarBlock{});
    for (int f = 0; f < static_cast<int>(flows.size()); ++f) blocks[f].flow_index = f;
    for (int v = 0; v < var_count; ++v) {
        VarBlock& b = blocks[var_flow[v]];
        if (b.var_count == 0) b.first_var = v;
        ++b.var_count;
    }

    // Per-server variable occupancy with multicast branch deduplication.
    std::vector<std::map<int, int>> at(graph.servers.size());
    for (int i = 0; i < static_cast<int>(virtual_flows.size()); ++i) {
        const VirtualFlow& vf = virtual_flows[i];
        for (int s : vf.path) {
            auto [it, inserted] = at[s].emplace(vf.var_id, i);
            if (!inserted) it->second = std::min(it->second, i);
        }
    }
    vars_at_server.assign(graph.servers.size(), {});
    for (std::size_t s = 0; s < at.size(); ++s)
        vars_at_server[s].assign(at[s].begin(), at[s].end());

    var_servers.assign(var_count, {});
    for (const auto& vf : virtual_flows) {
        auto& dst = var_servers[vf.var_id];
        dst.insert(dst.end(), vf.path.begin(), vf.path.end());
    }
    for (auto& v : var_servers) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    // Topological order over the servers used by candidate paths.
    std::vector<std::set<int>> succ(graph.servers.size());
    std::vector<int> indeg(graph.servers.size(), 0);
    std::vector<char> used(graph.servers.size(), 0);
    for (const auto& vf : virtual_flows) {
        for (int s : vf.path) used[s] = 1;
        for (std::size_t i = 1; i < vf.path.size(); ++i) {
            if (succ[vf.path[i - 1]].insert(vf.path[i]).second) ++indeg[vf.path[i]];
        }
    }
    topo_order.clear();
    std::vector<int> ready;
    for (int s = 0; s < static_cast<int>(graph.servers.size()); ++s)
        if (used[s] && indeg[s] == 0) ready.push_back(s);
    // Stable order: always take the smallest ready index.
    std::sort(ready.begin(), ready.end(), std::greater<int>());
    while (!ready.empty()) {
        int s = ready.back();
        ready.pop_back();
        topo_order.push_back(s);
        for (int t : succ[s]) {
            if (--indeg[t] == 0) {
                ready.push_back(t);
                std::sort(ready.begin(), ready.end(), std::greater<int>());
            }
        }
    }
    topo_pos.assign(graph.servers.size(), -1);
    for (int i = 0; i < static_cast<int>(topo_order.size()); ++i)
        topo_pos[topo_order[i]] = i;
}

std::vector<double> server_loads(const ProblemInstance& instance,
                                 const std::vector<double>& p) {
    std::vector<double> loads(instance.graph.servers.size(), 0.0);
    for (std::size_t s = 0; s < loads.size(); ++s) {
        for (auto [var, rep] : instance.vars_at_server[s]) {
            loads[s] += p[var] * instance.flows[instance.var_flow[var]].arrival.rate;
        }
    }
    return loads;
}

bool capacity_feasible(const ProblemInstance& instance,
                       const std::vector<double>& p, double slack) {
    auto loads = server_loads(instance, p);
    for (std::size_t s = 0; s < loads.size(); ++s) {
        double cap = instance.utilization_cap * instance.graph.servers[s].service.rate;
        if (loads[s] > cap + slack) return false;
    }
    return true;
}

std::optional<std::vector<int>> capacity_witness(const ProblemInstance& instance) {
    const int nflows = static_cast<int>(instance.flows.size());
    // Place flows with the largest rates first; pick per flow the alternative
    // that keeps the worst touched-server utilization smallest.
    std::vector<int> order(nflows);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return instance.flows[a].arrival.rate > instance.flows[b].arrival.rate;
    });

    const auto& var_servers = instance.var_servers;
    std::vector<double> loads(instance.graph.servers.size(), 0.0);
    std::vector<int> choice(nflows, -1);
    for (int f : order) {
        const VarBlock& block = instance.blocks[f];
        double rate = instance.flows[f].arrival.rate;
        int best = -1;
        double best_metric = 0.0;
        for (int v = block.first_var; v < block.first_var + block.var_count; ++v) {
            bool ok = true;
            double metric = 0.0;
            for (int s : var_servers[v]) {
                double cap =
                    instance.utilization_cap * instance.graph.servers[s].service.rate;
                double new_load = loads[s] + rate;
                if (new_load > cap) {
                    ok = false;
                    break;
                }
                metric = std::max(metric, new_load / cap);
            }
            if (ok && (best < 0 || metric < best_metric)) {
                best = v;
                best_metric = metric;
            }
        }
        if (best < 0) return std::nullopt;
        choice[f] = best;
        for (int s : var_servers[best]) loads[s] += rate;
    }
    return choice;
}

std::vector<std::string> validate(const ProblemInstance& instance) {
    std::vector<std::string> errors;
    const ServerGraph& g = instance.graph;

    std::set<std::pair<std::string, int>> port_levels;
    for (const Server& s : g.servers) {
        if (s.service.rate <= 0.0)
            errors.push_back("server '" + s.id + "': rate must be > 0");
        if (s.service.latency < 0.0)
            errors.push_back("server '" + s.id + "': latency must be >= 0");
        if (s.priority_level < 0)
            errors.push_back("server '" + s.id + "': priority level must be >= 0");
        if (!port_levels.emplace(s.port, s.priority_level).second)
            errors.push_back("duplicate (port, priority level) pair: ('" + s.port + "', " +
                             std::to_string(s.priority_level) + ")");
    }
    for (auto [from, to] : g.edges) {
        if (from < 0 || from >= static_cast<int>(g.servers.size()) || to < 0 ||
            to >= static_cast<int>(g.servers.size()))
            errors.push_back("edge references unknown server");
    }
    for (const Flow& f : instance.flows) {
        if (f.arrival.rate < 0.0)
            errors.push_back("flow '" + f.id + "': rate must be >= 0");
        if (f.arrival.burst < 0.0)
            errors.push_back("flow '" + f.id + "': burst must be >= 0");
    }
    if (instance.utilization_cap <= 0.0 || instance.utilization_cap > 1.0)
        errors.push_back("utilization cap must lie in (0, 1]");

    for (std::size_t f = 0; f < instance.flows.size(); ++f) {
        if (f >= instance.blocks.size() || instance.blocks[f].var_count == 0)
            errors.push_back("flow '" + instance.flows[f].id +
                             "': expands to no virtual flow");
    }

    // Feed-forwardness: the union of candidate paths must admit a topological
    // order; finalize() leaves unreachable servers out of topo_order when a
    // cycle exists.
    std::set<int> used;
    for (const auto& vf : instance.virtual_flows)
        used.insert(vf.path.begin(), vf.path.end());
    if (instance.topo_order.size() != used.size())
        errors.push_back("cycle: the union of candidate paths is not feed-forward");

    if (errors.empty() && !capacity_witness(instance))
        errors.push_back("no feasible witness: no integral assignment satisfies the "
                         "capacity constraint at every server");
    return errors;
}

ProblemInstance make_instance(ServerGraph graph, std::vector<Flow> flows,
                              double utilization_cap) {
    ProblemInstance inst;
    graph.rebuild_lookup();
    inst.graph = std::move(graph);
    inst.flows = std::move(flows);
    inst.utilization_cap = utilization_cap;
    inst.virtual_flows = expand_virtual_flows(inst.flows, inst.graph);
    inst.finalize();
    auto errors = validate(inst);
    if (!errors.empty()) {
        std::ostringstream oss;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (i) oss << "; ";
            oss << errors[i];
        }
        throw ValidationError(oss.str());
    }
    return inst;
}

}  // namespace ncsynth
