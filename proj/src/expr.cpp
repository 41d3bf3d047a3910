// expr.cpp - Expression pool with hash-consing and a reference interpreter.
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

#include "ncsynth/expr.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace ncsynth {

std::size_t ExprPool::NodeKeyHash::operator()(const NodeKey& k) const {
    // FNV-1a over the key fields; cheap and stable.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(k.op));
    mix(k.a);
    mix(k.b);
    mix(k.payload);
    return static_cast<std::size_t>(h);
}

ExprId ExprPool::intern(const ExprNode& n) {
    std::uint64_t payload = 0;
    if (n.op == Op::Const) {
        payload = std::bit_cast<std::uint64_t>(n.value);
    } else if (n.op == Op::Var) {
        payload = n.var;
    }
    NodeKey key{n.op, n.a, n.b, payload};
    auto it = interned_.find(key);
    if (it != interned_.end()) return it->second;
    ExprId id = static_cast<ExprId>(nodes_.size());
    nodes_.push_back(n);
    interned_.emplace(key, id);
    return id;
}

ExprId ExprPool::constant(double v) {
    ExprNode n;
    n.op = Op::Const;
    n.value = v;
    return intern(n);
}

ExprId ExprPool::variable(std::uint32_t var_index) {
    ExprNode n;
    n.op = Op::Var;
    n.var = var_index;
    var_count_ = std::max(var_count_, var_index + 1);
    return intern(n);
}

void ExprPool::declare_variables(std::uint32_t n) {
    var_count_ = std::max(var_count_, n);
}

ExprId ExprPool::binary(Op op, ExprId a, ExprId b) {
    ExprNode n;
    n.op = op;
    n.a = a;
    n.b = b;
    return intern(n);
}

ExprId ExprPool::ramp(ExprId a) {
    ExprNode n;
    n.op = Op::Ramp;
    n.a = a;
    return intern(n);
}

bool ExprPool::is_constant(ExprId id, double* out) const {
    const ExprNode& n = nodes_[id];
    if (n.op != Op::Const) return false;
    if (out) *out = n.value;
    return true;
}

double ExprPool::interpret(ExprId root, std::span<const double> x) const {
    std::vector<double> val(nodes_.size());
    std::vector<std::uint8_t> done(nodes_.size(), 0);
    std::vector<ExprId> stack;
    stack.push_back(root);
    while (!stack.empty()) {
        ExprId id = stack.back();
        if (done[id]) {
            stack.pop_back();
            continue;
        }
        const ExprNode& n = nodes_[id];
        switch (n.op) {
            case Op::Const:
                val[id] = n.value;
                break;
            case Op::Var:
                val[id] = x[n.var];
                break;
            case Op::Ramp:
                if (!done[n.a]) {
                    stack.push_back(n.a);
                    continue;
                }
                val[id] = val[n.a] > 0.0 ? val[n.a] : 0.0;
                break;
            default: {
                bool ready = true;
                if (!done[n.a]) {
                    stack.push_back(n.a);
                    ready = false;
                }
                if (!done[n.b]) {
                    stack.push_back(n.b);
                    ready = false;
                }
                if (!ready) continue;
                double a = val[n.a], b = val[n.b];
                switch (n.op) {
                    case Op::Add: val[id] = a + b; break;
                    case Op::Mul: val[id] = a * b; break;
                    case Op::Div:
                        if (b <= 0.0)
                            throw StabilityViolation(
                                "non-positive denominator in interpreted expression");
                        val[id] = a / b;
                        break;
                    case Op::Min: val[id] = a < b ? a : b; break;
                    case Op::Max: val[id] = a > b ? a : b; break;
                    default: break;
                }
                break;
            }
        }
        done[id] = 1;
        stack.pop_back();
    }
    return val[root];
}

}  // namespace ncsynth
