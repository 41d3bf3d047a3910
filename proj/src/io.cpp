// io.cpp - Strict JSON parsing and emission for instances and results.
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

#include "ncsynth/io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ncsynth {

namespace {

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ParseError("unknown field '" + it.key() + "' in " + where);
    }
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError("missing field '" + std::string(key) + "' in " + where);
    return *it;
}

double as_number(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError("expected a number in " + where);
    return v.get<double>();
}

std::string as_string(const Json& v, const std::string& where) {
    if (!v.is_string()) throw ParseError("expected a string in " + where);
    return v.get<std::string>();
}

int as_int(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError("expected an integer in " + where);
    return v.get<int>();
}

}  // namespace

ProblemInstance parse_instance(const Json& doc) {
    if (!doc.is_object()) throw ParseError("instance document must be an object");
    check_keys(doc, {"version", "servers", "edges", "flows", "options"}, "document");
    if (as_int(require(doc, "version", "document"), "version") != 1)
        throw ParseError("unsupported instance version (expected 1)");

    ServerGraph graph;
    const Json& servers = require(doc, "servers", "document");
    if (!servers.is_array() || servers.empty())
        throw ParseError("'servers' must be a non-empty array");
    for (const Json& js : servers) {
        const std::string where = "server #" + std::to_string(graph.servers.size());
        check_keys(js, {"id", "port", "priority_level", "rate", "latency"}, where);
        Server s;
        s.id = as_string(require(js, "id", where), where + ".id");
        s.port = as_string(require(js, "port", where), where + ".port");
        s.priority_level =
            as_int(require(js, "priority_level", where), where + ".priority_level");
        s.service.rate = as_number(require(js, "rate", where), where + ".rate");
        s.service.latency =
            as_number(require(js, "latency", where), where + ".latency");
        graph.servers.push_back(std::move(s));
    }
    graph.rebuild_lookup();

    const Json& edges = require(doc, "edges", "document");
    if (!edges.is_array()) throw ParseError("'edges' must be an array");
    for (const Json& je : edges) {
        if (!je.is_array() || je.size() != 2)
            throw ParseError("each edge must be a [from, to] pair");
        std::string from = as_string(je[0], "edge.from");
        std::string to = as_string(je[1], "edge.to");
        int fi = graph.index_of(from), ti = graph.index_of(to);
        if (fi < 0) throw ParseError("edge references unknown server '" + from + "'");
        if (ti < 0) throw ParseError("edge references unknown server '" + to + "'");
        graph.edges.push_back({fi, ti});
    }
    graph.rebuild_lookup();

    std::vector<Flow> flows;
    const Json& jflows = require(doc, "flows", "document");
    if (!jflows.is_array() || jflows.empty())
        throw ParseError("'flows' must be a non-empty array");
    for (const Json& jf : jflows) {
        const std::string where = "flow #" + std::to_string(flows.size());
        check_keys(jf,
                   {"id", "rate", "burst", "source", "destinations", "candidate_paths",
                    "allowed_priorities", "deadline"},
                   where);
        Flow f;
        f.id = as_string(require(jf, "id", where), where + ".id");
        f.arrival.rate = as_number(require(jf, "rate", where), where + ".rate");
        f.arrival.burst = as_number(require(jf, "burst", where), where + ".burst");
        f.source = as_string(require(jf, "source", where), where + ".source");
        if (graph.index_of(f.source) < 0)
            throw ParseError(where + ": unknown source server '" + f.source + "'");
        const Json& dests = require(jf, "destinations", where);
        if (!dests.is_array() || dests.empty())
            throw ParseError(where + ": 'destinations' must be a non-empty array");
        for (const Json& d : dests) {
            std::string id = as_string(d, where + ".destinations");
            if (graph.index_of(id) < 0)
                throw ParseError(where + ": unknown destination server '" + id + "'");
            f.destinations.push_back(std::move(id));
        }
        const Json& paths = require(jf, "candidate_paths", where);
        if (!paths.is_array() || paths.empty())
            throw ParseError(where + ": 'candidate_paths' must be a non-empty array");
        for (const Json& jp : paths) {
            if (!jp.is_array() || jp.empty())
                throw ParseError(where + ": each candidate path must be a non-empty array");
            std::vector<std::string> path;
            for (const Json& s : jp) {
                std::string id = as_string(s, where + ".candidate_paths");
                if (graph.index_of(id) < 0)
                    throw ParseError(where + ": candidate path references unknown server '" +
                                     id + "'");
                path.push_back(std::move(id));
            }
            f.candidate_paths.push_back(std::move(path));
        }
        const Json& prios = require(jf, "allowed_priorities", where);
        if (!prios.is_array() || prios.empty())
            throw ParseError(where + ": 'allowed_priorities' must be a non-empty array");
        for (const Json& p : prios)
            f.allowed_priorities.push_back(as_int(p, where + ".allowed_priorities"));
        if (jf.contains("deadline"))
            f.deadline = as_number(jf["deadline"], where + ".deadline");
        flows.push_back(std::move(f));
    }

    double rho = 0.999;
    if (doc.contains("options")) {
        const Json& opts = doc["options"];
        check_keys(opts, {"utilization_cap"}, "options");
        if (opts.contains("utilization_cap"))
            rho = as_number(opts["utilization_cap"], "options.utilization_cap");
    }

    try {
        return make_instance(std::move(graph), std::move(flows), rho);
    } catch (const ValidationError& e) {
        throw ParseError(std::string("invalid instance: ") + e.what());
    }
}

ProblemInstance parse_instance_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return parse_instance(doc);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file '" + path + "'");
    out << text;
}

ProblemInstance load_instance_file(const std::string& path) {
    return parse_instance_text(read_text_file(path));
}

Json instance_to_json(const ProblemInstance& instance) {
    Json doc;
    doc["version"] = 1;
    Json servers = Json::array();
    for (const Server& s : instance.graph.servers) {
        servers.push_back({{"id", s.id},
                           {"port", s.port},
                           {"priority_level", s.priority_level},
                           {"rate", s.service.rate},
                           {"latency", s.service.latency}});
    }
    doc["servers"] = std::move(servers);
    Json edges = Json::array();
    for (auto [from, to] : instance.graph.edges)
        edges.push_back({instance.graph.servers[from].id,
                         instance.graph.servers[to].id});
    doc["edges"] = std::move(edges);
    Json flows = Json::array();
    for (const Flow& f : instance.flows) {
        Json jf{{"id", f.id},
                {"rate", f.arrival.rate},
                {"burst", f.arrival.burst},
                {"source", f.source},
                {"destinations", f.destinations},
                {"candidate_paths", f.candidate_paths},
                {"allowed_priorities", f.allowed_priorities}};
        if (f.deadline) jf["deadline"] = *f.deadline;
        flows.push_back(std::move(jf));
    }
    doc["flows"] = std::move(flows);
    doc["options"] = {{"utilization_cap", instance.utilization_cap}};
    return doc;
}

void save_instance_file(const ProblemInstance& instance, const std::string& path) {
    write_text_file(path, instance_to_json(instance).dump(2) + "\n");
}

Json result_to_json(const OptimizerReport& report, const ProblemInstance& instance,
                    const Json& options_echo, bool include_timing) {
    Json doc;
    doc["version"] = 1;
    doc["method"] = report.method;
    doc["seed"] = report.seed;
    doc["options"] = options_echo;
    doc["feasible"] = report.feasible;
    if (std::isfinite(report.objective))
        doc["objective"] = report.objective;
    else
        doc["objective"] = nullptr;
    Json choices = Json::array();
    auto chosen = argmax_choice(instance, report.rounded);
    for (std::size_t f = 0; f < instance.flows.size(); ++f) {
        int v = chosen[f];
        Json jc{{"flow", instance.flows[f].id},
                {"alternative", instance.var_alternative[v]},
                {"priority", instance.var_priority[v]}};
        if (f < report.flow_delay_bounds.size())
            jc["delay_bound"] = report.flow_delay_bounds[f];
        else
            jc["delay_bound"] = nullptr;
        choices.push_back(std::move(jc));
    }
    doc["choices"] = std::move(choices);
    doc["trace"] = report.trace;
    doc["evaluation_count"] = report.evaluation_count;
    doc["diagnostic"] = report.diagnostic;
    if (include_timing) doc["wall_clock_seconds"] = report.wall_clock_seconds;
    return doc;
}

void save_result_file(const Json& result, const std::string& path) {
    write_text_file(path, result.dump(2) + "\n");
}

Assignment choices_to_assignment(const ProblemInstance& instance, const Json& doc) {
    if (!doc.contains("choices") || !doc["choices"].is_array())
        throw ParseError("assignment document lacks a 'choices' array");
    std::vector<int> chosen(instance.flows.size(), -1);
    for (const Json& jc : doc["choices"]) {
        std::string flow_id = as_string(require(jc, "flow", "choice"), "choice.flow");
        int alternative = as_int(require(jc, "alternative", "choice"), "choice.alternative");
        int priority = as_int(require(jc, "priority", "choice"), "choice.priority");
        int flow_index = -1;
        for (std::size_t f = 0; f < instance.flows.size(); ++f)
            if (instance.flows[f].id == flow_id) flow_index = static_cast<int>(f);
        if (flow_index < 0) throw ParseError("choice references unknown flow '" + flow_id + "'");
        const VarBlock& b = instance.blocks[flow_index];
        int var = -1;
        for (int v = b.first_var; v < b.first_var + b.var_count; ++v)
            if (instance.var_alternative[v] == alternative &&
                instance.var_priority[v] == priority)
                var = v;
        if (var < 0)
            throw ParseError("flow '" + flow_id + "' has no alternative " +
                             std::to_string(alternative) + " at priority " +
                             std::to_string(priority));
        chosen[flow_index] = var;
    }
    for (std::size_t f = 0; f < instance.flows.size(); ++f)
        if (chosen[f] < 0)
            throw ParseError("assignment misses flow '" + instance.flows[f].id + "'");
    return one_hot(instance, chosen);
}

}  // namespace ncsynth
