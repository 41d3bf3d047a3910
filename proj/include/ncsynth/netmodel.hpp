// netmodel.hpp - Servers, flows, candidate paths, and problem instances.
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

#ifndef NCSYNTH_NETMODEL_HPP
#define NCSYNTH_NETMODEL_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ncsynth {

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Rate-latency service curve parameters: beta(t) = rate * [t - latency]^+.
struct RateLatency {
    double rate = 0.0;
    double latency = 0.0;
};

// Token-bucket arrival curve parameters: gamma(t) = burst + rate * t.
// (0,0) is the null curve of a scaled-out virtual flow.
struct TokenBucket {
    double rate = 0.0;
    double burst = 0.0;
};

// One queueing location: a (port, priority level) pair with its own service
// curve. Level 0 is the highest priority.
struct Server {
    std::string id;
    std::string port;
    int priority_level = 0;
    RateLatency service;
};

struct ServerGraph {
    std::vector<Server> servers;
    std::vector<std::pair<int, int>> edges;  // dense server indices

    int index_of(const std::string& id) const;
    int server_at(const std::string& port, int level) const;
    bool has_edge(int from, int to) const;
    void rebuild_lookup();  // call after filling servers/edges

private:
    std::unordered_map<std::string, int> by_id_;
    std::unordered_map<std::string, int> by_port_level_;
    std::unordered_set<std::uint64_t> edge_set_;
};

// A flow with its candidate paths. Paths are server-id sequences starting at
// `source` and ending at one of `destinations`; for multicast flows every
// destination must have the same number of candidate paths, and alternative j
// means "the j-th path of every destination" (one joint routing choice).
struct Flow {
    std::string id;
    TokenBucket arrival;
    std::string source;
    std::vector<std::string> destinations;
    std::vector<std::vector<std::string>> candidate_paths;
    std::vector<int> allowed_priorities;
    std::optional<double> deadline;
};

// One (flow, path alternative, priority, destination) copy of a flow, mapped
// onto the servers of the chosen priority level. All destination branches of
// the same (alternative, priority) choice share one selection variable.
struct VirtualFlow {
    int flow_index = -1;
    int alternative = -1;  // joint path-bundle index j
    int priority = -1;     // priority level k
    int destination = -1;  // index into flow.destinations
    int var_id = -1;
    std::vector<int> path;  // dense server indices, all at priority level k
};

// Selection variables of one flow form one simplex block.
struct VarBlock {
    int flow_index = -1;
    int first_var = 0;
    int var_count = 0;
};

struct ProblemInstance {
    ServerGraph graph;
    std::vector<Flow> flows;
    std::vector<VirtualFlow> virtual_flows;
    double utilization_cap = 0.999;  // rho

    // Derived lookups, filled by finalize().
    int var_count = 0;
    std::vector<VarBlock> blocks;                    // one per flow
    std::vector<int> var_flow;                       // var_id -> flow index
    std::vector<int> var_alternative;                // var_id -> j
    std::vector<int> var_priority;                   // var_id -> k
    std::vector<std::vector<int>> vfs_of_var;        // var_id -> vf indices
    // Per server: (var_id, representative vf index) of every variable with a
    // branch crossing it, sorted by var_id. Overlapping multicast branches of
    // one variable are counted once (smallest vf index represents them).
    std::vector<std::vector<std::pair<int, int>>> vars_at_server;
    // Per variable: sorted distinct servers crossed by any of its branches.
    std::vector<std::vector<int>> var_servers;
    std::vector<int> topo_order;  // servers used by any virtual flow
    std::vector<int> topo_pos;    // server -> position, -1 if unused

    void finalize();
};

// Expands flows into virtual flows, one per (alternative, priority,
// destination), assigning globally contiguous var ids per flow block.
// Throws ValidationError when a path cannot be mapped onto some allowed
// priority level or is disconnected.
std::vector<VirtualFlow> expand_virtual_flows(const std::vector<Flow>& flows,
                                              const ServerGraph& graph);

// Expansion of a single multicast flow (>= 2 destinations); var ids are local
// to the flow, starting at first_var.
std::vector<VirtualFlow> multicast_to_unicast(const Flow& flow, int flow_index,
                                              const ServerGraph& graph,
                                              int first_var);

// Structural checks: curve positivity, unique (port, level), edge sanity,
// feed-forwardness of the union of candidate paths, and existence of a
// capacity-feasible witness. Returns an empty list when the instance is ok.
std::vector<std::string> validate(const ProblemInstance& instance);

// Greedy search for an integral assignment satisfying the rho-capped
// capacity constraint at every server. Returns one chosen var id per flow,
// or nullopt when the greedy placement fails.
std::optional<std::vector<int>> capacity_witness(const ProblemInstance& instance);

// Builds, finalizes and validates an instance; throws ValidationError with
// the joined error messages on failure.
ProblemInstance make_instance(ServerGraph graph, std::vector<Flow> flows,
                              double utilization_cap = 0.999);

// Per-server load sum_{vars crossing s} rate(flow(var)) * p[var] for an
// assignment; used by the capacity checks and by rounding repair.
std::vector<double> server_loads(const ProblemInstance& instance,
                                 const std::vector<double>& p);

// True when every server load respects rho * rate (with a tiny slack for
// floating-point noise in relaxed assignments).
bool capacity_feasible(const ProblemInstance& instance,
                       const std::vector<double>& p, double slack = 1e-9);

}  // namespace ncsynth

#endif  // NCSYNTH_NETMODEL_HPP
