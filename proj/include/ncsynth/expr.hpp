// expr.hpp - Scalar expression DAG over curve parameters and selection variables.
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

#ifndef NCSYNTH_EXPR_HPP
#define NCSYNTH_EXPR_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ncsynth {

// Thrown when a division hits a non-positive denominator during numeric
// evaluation, i.e. a left-over service curve lost stability (cross-traffic
// rate reached the server rate) at the evaluated point.
struct StabilityViolation : std::runtime_error {
    explicit StabilityViolation(const std::string& what, int output = -1)
        : std::runtime_error(what), output_id(output) {}
    int output_id;  // offending output index when known, -1 otherwise
};

enum class Op : std::uint8_t {
    Const,
    Var,
    Add,
    Mul,
    Div,
    Min,
    Max,
    Ramp,  // [x]^+ = max(x, 0), unary
};

using ExprId = std::uint32_t;
inline constexpr ExprId kNoExpr = 0xffffffffu;

struct ExprNode {
    Op op;
    ExprId a = kNoExpr;  // left operand; only operand for Ramp
    ExprId b = kNoExpr;  // right operand
    double value = 0.0;  // payload for Const
    std::uint32_t var = 0;  // payload for Var
};

// Append-only arena of expression nodes with hash-consing: building the same
// (op, operands) twice yields the same id, so shared subexpressions are
// represented once and node ids are topologically ordered (operands precede
// users). Ids are stable; growing the pool never invalidates them.
class ExprPool {
public:
    ExprId constant(double v);
    ExprId variable(std::uint32_t var_index);

    ExprId add(ExprId a, ExprId b) { return binary(Op::Add, a, b); }
    ExprId mul(ExprId a, ExprId b) { return binary(Op::Mul, a, b); }
    ExprId div(ExprId a, ExprId b) { return binary(Op::Div, a, b); }
    ExprId min(ExprId a, ExprId b) { return binary(Op::Min, a, b); }
    ExprId max(ExprId a, ExprId b) { return binary(Op::Max, a, b); }
    ExprId ramp(ExprId a);

    // a - b, spelled as a + (-1)*b since the instruction set has no Sub.
    ExprId sub(ExprId a, ExprId b) { return add(a, mul(constant(-1.0), b)); }

    const ExprNode& node(ExprId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

    // Number of selection variables the pool is aware of. Expressions may
    // reference fewer; declare_variables() widens the count so evaluation
    // vectors have a fixed dimension.
    std::uint32_t variable_count() const { return var_count_; }
    void declare_variables(std::uint32_t n);

    bool is_constant(ExprId id, double* out = nullptr) const;

    // Direct (uncompiled) evaluation of one root. This is the reference
    // interpreter the compiled tape is checked against; it walks the DAG
    // with an explicit stack and a per-call value cache.
    double interpret(ExprId root, std::span<const double> x) const;

private:
    ExprId binary(Op op, ExprId a, ExprId b);
    ExprId intern(const ExprNode& n);

    struct NodeKey {
        Op op;
        ExprId a, b;
        std::uint64_t payload;
        bool operator==(const NodeKey&) const = default;
    };
    struct NodeKeyHash {
        std::size_t operator()(const NodeKey& k) const;
    };

    std::vector<ExprNode> nodes_;
    std::unordered_map<NodeKey, ExprId, NodeKeyHash> interned_;
    std::uint32_t var_count_ = 0;
};

}  // namespace ncsynth

#endif  // NCSYNTH_EXPR_HPP
