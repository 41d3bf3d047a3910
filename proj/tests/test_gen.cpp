// test_gen.cpp - Generator determinism, statistics, enumeration oracle.
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

#include <cmath>

#include "doctest.h"
#include "ncsynth/gen.hpp"
#include "ncsynth/io.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace ncsynth;
using namespace ncsynth::testing;

TEST_CASE("k_shortest_paths enumerates loopless hop-count paths in order") {
    // 0 -> {1,2} -> 3, plus a long detour 0 -> 4 -> 1.
    std::vector<std::vector<int>> adj{{1, 2, 4}, {3}, {3}, {}, {1}};
    auto paths = k_shortest_paths(adj, 0, 3, 5);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0] == std::vector<int>{0, 1, 3});
    CHECK(paths[1] == std::vector<int>{0, 2, 3});
    CHECK(paths[2] == std::vector<int>{0, 4, 1, 3});

    CHECK(k_shortest_paths(adj, 3, 0, 2).empty());
    auto just_one = k_shortest_paths(adj, 2, 3, 4);
    REQUIRE(just_one.size() == 1);
}

TEST_CASE("generated instances validate and are deterministic per seed") {
    GenSpec spec;
    spec.seed = 11;
    auto a = generate(spec);
    CHECK(validate(a).empty());
    CHECK(capacity_witness(a).has_value());

    auto b = generate(spec);
    CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());

    spec.seed = 12;
    auto c = generate(spec);
    CHECK(instance_to_json(a).dump() != instance_to_json(c).dump());
}

TEST_CASE("generated statistics stay inside the requested ranges") {
    GenSpec spec;
    spec.min_ports = 3;
    spec.max_ports = 18;
    spec.min_flows = 3;
    spec.max_flows = 21;
    spec.priority_classes = 1;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        spec.seed = seed;
        auto inst = generate(spec);
        auto st = stats(inst);
        CHECK(st.servers >= 3);
        CHECK(st.servers <= 18);
        CHECK(st.flows >= 3);
        CHECK(st.flows <= 21);
        CHECK(st.virtual_flows >= st.flows);
    }
}

TEST_CASE("single-alternative specs make optimization trivial") {
    GenSpec spec;
    spec.paths_per_flow = 1;
    spec.priority_classes = 1;
    spec.seed = 4;
    auto inst = generate(spec);
    for (const VarBlock& b : inst.blocks) CHECK(b.var_count == 1);
    CHECK(inst.var_count == static_cast<int>(inst.flows.size()));
}

TEST_CASE("stats: combination logs follow the product rule") {
    // Two flows with 2 and 3 alternatives: log10(6).
    std::vector<Server> servers{make_server("s", 50, 0.01), make_server("a", 50, 0.01),
                                make_server("b", 50, 0.01), make_server("c", 50, 0.01),
                                make_server("t", 50, 0.01)};
    auto graph = make_graph(std::move(servers),
                            {{"s", "a"}, {"s", "b"}, {"s", "c"},
                             {"a", "t"}, {"b", "t"}, {"c", "t"}});
    std::vector<Flow> flows;
    flows.push_back(make_flow("f2", 0.2, 0.2, "s", {"t"},
                              {{"s", "a", "t"}, {"s", "b", "t"}}));
    flows.push_back(make_flow("f3", 0.2, 0.2, "s", {"t"},
                              {{"s", "a", "t"}, {"s", "b", "t"}, {"s", "c", "t"}}));
    auto inst = make_instance(graph, flows, 1.0);
    auto st = stats(inst);
    CHECK(st.log10_path_combinations == doctest::Approx(std::log10(6.0)));
    CHECK(st.log10_path_priority_combinations == doctest::Approx(std::log10(6.0)));

    // One flow, one alternative: log10(1) = 0.
    std::vector<Flow> one;
    one.push_back(make_flow("f1", 0.2, 0.2, "s", {"t"}, {{"s", "a", "t"}}));
    auto inst1 = make_instance(graph, one, 1.0);
    CHECK(stats(inst1).log10_path_combinations == doctest::Approx(0.0));

    // Dataset aggregation: medians over the two instances above.
    std::vector<InstanceStats> rows{stats(inst), stats(inst1)};
    auto agg = aggregate_stats(rows);
    CHECK(agg.flows.min == doctest::Approx(1.0));
    CHECK(agg.flows.max == doctest::Approx(2.0));
    CHECK(agg.flows.median == doctest::Approx(1.5));
}

TEST_CASE("enumerate evaluates all combinations and returns the minimum") {
    auto graph = make_graph({make_server("src", 10, 0), make_server("a", 1, 1),
                             make_server("b", 1, 3), make_server("t", 50, 0)},
                            {{"src", "a"}, {"src", "b"}, {"a", "t"}, {"b", "t"}});
    std::vector<Flow> flows;
    flows.push_back(make_flow("f", 0.1, 2, "src", {"t"},
                              {{"src", "a", "t"}, {"src", "b", "t"}}));
    auto inst = make_instance(graph, flows, 1.0);
    auto analysis = compile_analysis(inst, {});

    auto res = enumerate_all(inst, analysis, 1000, 1, true);
    CHECK(res.found);
    CHECK(res.total_combinations == 2);
    CHECK(res.feasible_count == 2);
    CHECK(res.objective == doctest::Approx(3.0));
    CHECK(res.best_choice == std::vector<int>{0});
    REQUIRE(res.ranking.size() == 2);
    CHECK(res.ranking[0].first == doctest::Approx(3.0));
    CHECK(res.ranking[1].first == doctest::Approx(5.0));

    // Parallel evaluation agrees with serial.
    auto par = enumerate_all(inst, analysis, 1000, 4);
    CHECK(par.objective == res.objective);
    CHECK(par.best_choice == res.best_choice);

    // Limit guard.
    CHECK_THROWS_AS(enumerate_all(inst, analysis, 1, 1), std::invalid_argument);
}

TEST_CASE("enumerate reports infeasibility when every combination overloads") {
    // Two flows forced through a server that fits either but not both; a
    // witness exists only because of the alternative; block both with
    // deadlines instead so every combination is infeasible.
    auto graph = make_graph({make_server("s", 10, 5)}, {});
    std::vector<Flow> flows;
    auto f = make_flow("f", 1, 1, "s", {"s"}, {{"s"}});
    f.deadline = 1.0;  // bound 1/10 + 5 = 5.1 > 1: never met
    flows.push_back(f);
    auto inst = make_instance(graph, flows, 1.0);
    auto analysis = compile_analysis(inst, {});
    auto res = enumerate_all(inst, analysis, 10, 1);
    CHECK_FALSE(res.found);
    CHECK(res.feasible_count == 0);
}

TEST_CASE("parameterized bounds equal the reference SFA at one-hot points") {
    GenSpec spec;
    spec.min_flows = 4;
    spec.max_flows = 10;
    spec.priority_classes = 2;
    for (std::uint64_t seed = 21; seed < 27; ++seed) {
        spec.seed = seed;
        auto inst = generate(spec);
        ExprPool pool;
        auto terms = analyze_all(inst, pool);

        auto witness = capacity_witness(inst);
        REQUIRE(witness.has_value());
        std::vector<RefServer> servers;
        std::vector<RefFlow> flows;
        auto selected = induced_network(inst, *witness, &servers, &flows);
        auto ref = ref_sfa_bounds(servers, flows);

        Assignment x = one_hot(inst, *witness);
        for (std::size_t i = 0; i < selected.size(); ++i) {
            double ours = pool.interpret(terms[selected[i]].expr, x.p);
            CHECK(std::fabs(ours - ref[i]) <= 1e-9 * std::max(1.0, std::fabs(ref[i])));
        }
    }
}

TEST_CASE("generated multicast flows keep one variable per joint choice") {
    GenSpec spec;
    spec.multicast_fraction = 1.0;
    spec.min_flows = 3;
    spec.max_flows = 6;
    spec.seed = 2;
    auto inst = generate(spec);
    bool saw_multicast = false;
    for (const Flow& f : inst.flows)
        if (f.destinations.size() > 1) saw_multicast = true;
    CHECK(saw_multicast);
    // Branch count equals destinations x alternatives x priorities per flow.
    for (const VarBlock& b : inst.blocks) {
        const Flow& f = inst.flows[b.flow_index];
        int branches = 0;
        for (int v = b.first_var; v < b.first_var + b.var_count; ++v)
            branches += static_cast<int>(inst.vfs_of_var[v].size());
        CHECK(branches == b.var_count * static_cast<int>(f.destinations.size()));
    }
}
