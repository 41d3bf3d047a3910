// test_netmodel.cpp - Virtual-flow expansion and instance validation.
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

#include <set>

#include "doctest.h"
#include "ncsynth/netmodel.hpp"
#include "test_helpers.hpp"

using namespace ncsynth;
using namespace ncsynth::testing;

namespace {

// Diamond at two priority levels: a -> {b, c} -> d, every port split into
// levels 0 and 1.
ServerGraph diamond_two_levels() {
    std::vector<Server> servers;
    for (int level = 0; level < 2; ++level)
        for (std::string port : {"a", "b", "c", "d"})
            servers.push_back(make_server(port + "_k" + std::to_string(level), 100,
                                          0.001, level, port));
    std::vector<std::pair<std::string, std::string>> edges;
    for (int level = 0; level < 2; ++level) {
        std::string k = "_k" + std::to_string(level);
        edges.push_back({"a" + k, "b" + k});
        edges.push_back({"a" + k, "c" + k});
        edges.push_back({"b" + k, "d" + k});
        edges.push_back({"c" + k, "d" + k});
    }
    return make_graph(std::move(servers), std::move(edges));
}

}  // namespace

TEST_CASE("two paths times two priorities expand to four virtual flows") {
    auto graph = diamond_two_levels();
    auto flow = make_flow("f", 1, 1, "a_k0", {"d_k0"},
                          {{"a_k0", "b_k0", "d_k0"}, {"a_k0", "c_k0", "d_k0"}}, {0, 1});
    auto vfs = expand_virtual_flows({flow}, graph);
    CHECK(vfs.size() == 4);
    std::set<int> vars;
    for (const auto& vf : vfs) vars.insert(vf.var_id);
    CHECK(vars.size() == 4);
    // Priority-1 copies run over the level-1 servers.
    for (const auto& vf : vfs)
        for (int s : vf.path) CHECK(graph.servers[s].priority_level == vf.priority);
}

TEST_CASE("one path and one priority expand to a single virtual flow") {
    auto graph = diamond_two_levels();
    auto flow =
        make_flow("f", 1, 1, "a_k0", {"d_k0"}, {{"a_k0", "b_k0", "d_k0"}}, {0});
    auto vfs = expand_virtual_flows({flow}, graph);
    CHECK(vfs.size() == 1);
    CHECK(vfs[0].var_id == 0);
}

TEST_CASE("multicast expansion shares one variable across destinations") {
    auto graph = diamond_two_levels();

    // Two destinations, one path each, one priority: 2 virtual flows, 1 var.
    auto m1 = make_flow("m1", 1, 1, "a_k0", {"b_k0", "c_k0"},
                        {{"a_k0", "b_k0"}, {"a_k0", "c_k0"}}, {0});
    auto vfs = multicast_to_unicast(m1, 0, graph, 0);
    CHECK(vfs.size() == 2);
    CHECK(vfs[0].var_id == vfs[1].var_id);

    // Same with two priorities: 4 virtual flows, 2 vars.
    auto m2 = make_flow("m2", 1, 1, "a_k0", {"b_k0", "c_k0"},
                        {{"a_k0", "b_k0"}, {"a_k0", "c_k0"}}, {0, 1});
    vfs = multicast_to_unicast(m2, 0, graph, 0);
    CHECK(vfs.size() == 4);
    std::set<int> vars;
    for (const auto& vf : vfs) vars.insert(vf.var_id);
    CHECK(vars.size() == 2);

    // Eight destinations with one path each stay on a single variable.
    std::vector<Server> servers{make_server("src", 100, 0.001)};
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::string> dests;
    std::vector<std::vector<std::string>> paths;
    for (int i = 0; i < 8; ++i) {
        std::string d = "d" + std::to_string(i);
        servers.push_back(make_server(d, 100, 0.001));
        edges.push_back({"src", d});
        dests.push_back(d);
        paths.push_back({"src", d});
    }
    auto star = make_graph(std::move(servers), std::move(edges));
    auto m8 = make_flow("m8", 1, 1, "src", dests, paths, {0});
    vfs = multicast_to_unicast(m8, 0, star, 0);
    CHECK(vfs.size() == 8);
    for (const auto& vf : vfs) CHECK(vf.var_id == 0);
}

TEST_CASE("multicast_to_unicast rejects unicast flows and missing paths") {
    auto graph = diamond_two_levels();
    auto uni = make_flow("u", 1, 1, "a_k0", {"d_k0"}, {{"a_k0", "b_k0", "d_k0"}}, {0});
    CHECK_THROWS_AS(multicast_to_unicast(uni, 0, graph, 0), ValidationError);

    auto missing = make_flow("m", 1, 1, "a_k0", {"b_k0", "c_k0"}, {{"a_k0", "b_k0"}}, {0});
    CHECK_THROWS_AS(multicast_to_unicast(missing, 0, graph, 0), ValidationError);
}

TEST_CASE("expansion errors: disconnected path and absent priority level") {
    auto graph = diamond_two_levels();
    auto skip = make_flow("f", 1, 1, "a_k0", {"d_k0"}, {{"a_k0", "d_k0"}}, {0});
    CHECK_THROWS_WITH_AS(expand_virtual_flows({skip}, graph),
                         doctest::Contains("path not found"), ValidationError);

    auto high = make_flow("f", 1, 1, "a_k0", {"d_k0"}, {{"a_k0", "b_k0", "d_k0"}}, {7});
    CHECK_THROWS_WITH_AS(expand_virtual_flows({high}, graph),
                         doctest::Contains("priority level"), ValidationError);
}

TEST_CASE("per-flow variable blocks partition the variables") {
    auto graph = diamond_two_levels();
    std::vector<Flow> flows;
    flows.push_back(make_flow("f0", 0.1, 0.1, "a_k0", {"d_k0"},
                              {{"a_k0", "b_k0", "d_k0"}, {"a_k0", "c_k0", "d_k0"}},
                              {0, 1}));
    flows.push_back(make_flow("f1", 0.1, 0.1, "a_k0", {"d_k0"},
                              {{"a_k0", "b_k0", "d_k0"}}, {0}));
    auto inst = make_instance(graph, flows, 1.0);
    REQUIRE(inst.blocks.size() == 2);
    CHECK(inst.blocks[0].first_var == 0);
    CHECK(inst.blocks[0].var_count == 4);
    CHECK(inst.blocks[1].first_var == 4);
    CHECK(inst.blocks[1].var_count == 1);
    CHECK(inst.var_count == 5);
}

TEST_CASE("validate flags cycles used by candidate paths") {
    auto graph = make_graph({make_server("A", 10, 0.1), make_server("B", 10, 0.1)},
                            {{"A", "B"}, {"B", "A"}});
    std::vector<Flow> flows;
    flows.push_back(make_flow("f", 1, 1, "A", {"A"}, {{"A", "B", "A"}}));
    CHECK_THROWS_WITH_AS(make_instance(graph, flows, 1.0),
                         doctest::Contains("cycle"), ValidationError);
}

TEST_CASE("validate accepts a well-formed instance") {
    auto inst = tandem_instance();
    CHECK(validate(inst).empty());
    CHECK(capacity_witness(inst).has_value());
}

TEST_CASE("validate reports a missing capacity witness") {
    // Both flows are forced through the same server whose capacity fits only
    // one of them.
    auto graph = make_graph({make_server("X", 1.5, 0.1)}, {});
    std::vector<Flow> flows;
    flows.push_back(make_flow("f0", 1.0, 0.1, "X", {"X"}, {{"X"}}));
    flows.push_back(make_flow("f1", 1.0, 0.1, "X", {"X"}, {{"X"}}));
    CHECK_THROWS_WITH_AS(make_instance(graph, flows, 1.0),
                         doctest::Contains("witness"), ValidationError);
}

TEST_CASE("validate rejects non-positive curve parameters") {
    auto graph = make_graph({make_server("X", 0.0, 0.1)}, {});
    std::vector<Flow> flows;
    flows.push_back(make_flow("f0", 0.1, 0.1, "X", {"X"}, {{"X"}}));
    CHECK_THROWS_WITH_AS(make_instance(graph, flows, 1.0),
                         doctest::Contains("rate"), ValidationError);
}

TEST_CASE("duplicate candidate paths are rejected") {
    auto graph = diamond_two_levels();
    auto dup = make_flow("f", 1, 1, "a_k0", {"d_k0"},
                         {{"a_k0", "b_k0", "d_k0"}, {"a_k0", "b_k0", "d_k0"}}, {0});
    CHECK_THROWS_WITH_AS(expand_virtual_flows({dup}, graph),
                         doctest::Contains("duplicate"), ValidationError);
}

TEST_CASE("server loads deduplicate multicast branches") {
    // One multicast flow with a shared prefix: the shared server counts the
    // flow once.
    std::vector<Server> servers{make_server("a", 10, 0.01), make_server("b", 10, 0.01),
                                make_server("c", 10, 0.01)};
    auto graph = make_graph(std::move(servers), {{"a", "b"}, {"a", "c"}});
    auto flow = make_flow("m", 2, 1, "a", {"b", "c"}, {{"a", "b"}, {"a", "c"}});
    auto inst = make_instance(graph, {flow}, 1.0);
    std::vector<double> p{1.0};
    auto loads = server_loads(inst, p);
    CHECK(loads[inst.graph.index_of("a")] == doctest::Approx(2.0));
    CHECK(loads[inst.graph.index_of("b")] == doctest::Approx(2.0));
    CHECK(loads[inst.graph.index_of("c")] == doctest::Approx(2.0));
}
