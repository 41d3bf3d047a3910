// gen.hpp - Random instance generation, statistics, exhaustive enumeration.
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

#ifndef NCSYNTH_GEN_HPP
#define NCSYNTH_GEN_HPP

#include <cstdint>
#include <vector>

#include "ncsynth/netmodel.hpp"
#include "ncsynth/optim.hpp"

namespace ncsynth {

// Ranges for the random dataset. Networks are layered feed-forward digraphs
// (forward edges only), so feed-forwardness holds by construction; parameter
// ranges are uniform. `ports` counts queueing locations per priority level;
// the instance has ports * priority_classes servers.
struct GenSpec {
    int min_ports = 3;
    int max_ports = 18;
    int min_flows = 3;
    int max_flows = 21;
    int min_layers = 2;
    int max_layers = 4;
    double edge_density = 0.35;  // extra inter-layer edges beyond the spine
    double server_rate_min = 50.0;
    double server_rate_max = 100.0;
    double server_latency_min = 0.001;
    double server_latency_max = 0.01;
    double flow_rate_min = 0.1;
    double flow_rate_max = 1.0;
    double flow_burst_min = 0.1;
    double flow_burst_max = 1.0;
    int paths_per_flow = 3;  // k for the k-shortest-path candidate builder
    int priority_classes = 1;
    double multicast_fraction = 0.0;  // flows drawn with two destinations
    double deadline_fraction = 0.0;   // flows given a delay requirement
    double utilization_cap = 0.999;
    std::uint64_t seed = 0;
};

// Draws an instance matching the spec; deterministic per seed. Retries with
// progressively scaled-down flow rates (up to 100 draws) until the greedy
// capacity witness exists; throws ValidationError when that never happens.
ProblemInstance generate(const GenSpec& spec);

// Hop-count k-shortest paths (loopless) in a digraph given as adjacency
// lists; deterministic tie-breaking by node index. Exposed for tests.
std::vector<std::vector<int>> k_shortest_paths(
    const std::vector<std::vector<int>>& adjacency, int source, int target, int k);

struct InstanceStats {
    int servers = 0;
    int flows = 0;
    int virtual_flows = 0;
    double log10_path_combinations = 0.0;           // paths only
    double log10_path_priority_combinations = 0.0;  // paths x priorities
};
InstanceStats stats(const ProblemInstance& instance);

// Min/mean/median/max rows over a dataset of per-instance statistics.
struct DatasetStats {
    struct Row {
        double min = 0.0, mean = 0.0, median = 0.0, max = 0.0;
    };
    Row servers, flows, virtual_flows, log10_path_combinations,
        log10_path_priority_combinations;
};
DatasetStats aggregate_stats(const std::vector<InstanceStats>& rows);

// Exhaustive enumeration of integral combinations; the optimality oracle.
struct EnumerateResult {
    bool found = false;  // at least one feasible combination
    Assignment best;
    std::vector<int> best_choice;  // chosen var per flow
    double objective = 0.0;
    long feasible_count = 0;
    unsigned long long total_combinations = 0;
    // Feasible (objective, choice) pairs sorted ascending; only collected on
    // request and only evaluated serially.
    std::vector<std::pair<double, std::vector<int>>> ranking;
};

// Evaluates every capacity- and deadline-feasible integral combination on the
// compiled graph. Throws std::invalid_argument when the combination count
// exceeds `limit`. Parallel across combinations; the reduction (min by
// (objective, combination index)) is deterministic for any task count.
EnumerateResult enumerate_all(const ProblemInstance& instance,
                              CompiledAnalysis& analysis,
                              unsigned long long limit = 1000000, int tasks = 1,
                              bool full_ranking = false);

}  // namespace ncsynth

#endif  // NCSYNTH_GEN_HPP
