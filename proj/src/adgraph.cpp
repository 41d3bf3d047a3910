// adgraph.cpp - Tape compiler, forward/backward passes, parallel evaluation.
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

#include "ncsynth/adgraph.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ncsynth {

CompiledGraph CompiledGraph::compile(const ExprPool& pool,
                                     std::span<const ExprId> roots) {
    CompiledGraph g;
    g.var_count_ = pool.variable_count();

    // Mark nodes reachable from the roots.
    std::vector<std::uint8_t> reach(pool.size(), 0);
    std::vector<ExprId> stack(roots.begin(), roots.end());
    while (!stack.empty()) {
        ExprId id = stack.back();
        stack.pop_back();
        if (reach[id]) continue;
        reach[id] = 1;
        const ExprNode& n = pool.node(id);
        if (n.op == Op::Ramp) {
            stack.push_back(n.a);
        } else if (n.op != Op::Const && n.op != Op::Var) {
            stack.push_back(n.a);
            stack.push_back(n.b);
        }
    }

    // Emit reachable nodes in pool-id order. Ids are topological (operands
    // precede users), and the order is stable, so recompiling the same DAG
    // produces an identical tape.
    std::vector<std::uint32_t> slot_of(pool.size(),
                                       std::numeric_limits<std::uint32_t>::max());
    for (ExprId id = 0; id < pool.size(); ++id) {
        if (!reach[id]) continue;
        const ExprNode& n = pool.node(id);
        Instr ins;
        ins.op = n.op;
        switch (n.op) {
            case Op::Const: ins.imm = n.value; break;
            case Op::Var: ins.a = n.var; break;
            case Op::Ramp: ins.a = slot_of[n.a]; break;
            default:
                ins.a = slot_of[n.a];
                ins.b = slot_of[n.b];
                break;
        }
        slot_of[id] = static_cast<std::uint32_t>(g.instrs_.size());
        g.instrs_.push_back(ins);
    }
    g.outputs_.reserve(roots.size());
    for (ExprId r : roots) g.outputs_.push_back(slot_of[r]);
    return g;
}

namespace {

inline double exec_instr(const Instr& ins, const double* slots, const double* x) {
    switch (ins.op) {
        case Op::Const: return ins.imm;
        case Op::Var: return x[ins.a];
        case Op::Add: return slots[ins.a] + slots[ins.b];
        case Op::Mul: return slots[ins.a] * slots[ins.b];
        case Op::Div: {
            double d = slots[ins.b];
            if (d <= 0.0) throw StabilityViolation("stability violated: division by non-positive value");
            return slots[ins.a] / d;
        }
        case Op::Min: {
            double a = slots[ins.a], b = slots[ins.b];
            return a < b ? a : b;
        }
        case Op::Max: {
            double a = slots[ins.a], b = slots[ins.b];
            return a > b ? a : b;
        }
        case Op::Ramp: {
            double a = slots[ins.a];
            return a > 0.0 ? a : 0.0;
        }
    }
    return 0.0;
}

// Propagates the adjoint of one instruction to its operands.
inline void propagate_adjoint(const Instr& ins, const double* slots, double w,
                              double* adj) {
    switch (ins.op) {
        case Op::Const:
        case Op::Var:
            break;
        case Op::Add:
            adj[ins.a] += w;
            adj[ins.b] += w;
            break;
        case Op::Mul:
            adj[ins.a] += w * slots[ins.b];
            adj[ins.b] += w * slots[ins.a];
            break;
        case Op::Div: {
            double inv = 1.0 / slots[ins.b];
            adj[ins.a] += w * inv;
            adj[ins.b] -= w * slots[ins.a] * inv * inv;
            break;
        }
        case Op::Min:
            // Ties route to the first operand: H(0) = 1.
            if (slots[ins.a] <= slots[ins.b])
                adj[ins.a] += w;
            else
                adj[ins.b] += w;
            break;
        case Op::Max:
            if (slots[ins.a] >= slots[ins.b])
                adj[ins.a] += w;
            else
                adj[ins.b] += w;
            break;
        case Op::Ramp:
            if (slots[ins.a] >= 0.0) adj[ins.a] += w;
            break;
    }
}

}  // namespace

int CompiledGraph::output_depending_on(std::uint32_t slot) const {
    // Error path only: find the first output whose sub-tape contains `slot`.
    for (std::size_t o = 0; o < outputs_.size(); ++o) {
        std::vector<std::uint8_t> seen(instrs_.size(), 0);
        std::vector<std::uint32_t> stack{outputs_[o]};
        while (!stack.empty()) {
            std::uint32_t i = stack.back();
            stack.pop_back();
            if (seen[i]) continue;
            seen[i] = 1;
            if (i == slot) return static_cast<int>(o);
            const Instr& ins = instrs_[i];
            if (ins.op == Op::Ramp) {
                stack.push_back(ins.a);
            } else if (ins.op != Op::Const && ins.op != Op::Var) {
                stack.push_back(ins.a);
                stack.push_back(ins.b);
            }
        }
    }
    return -1;
}

void CompiledGraph::forward_slots(std::span<const double> x,
                                  std::vector<double>& slots) const {
    slots.resize(instrs_.size());
    double* s = slots.data();
    const double* xs = x.data();
    std::size_t fail = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < instrs_.size(); ++i) {
        const Instr& ins = instrs_[i];
        switch (ins.op) {
            case Op::Const: s[i] = ins.imm; break;
            case Op::Var: s[i] = xs[ins.a]; break;
            case Op::Add: s[i] = s[ins.a] + s[ins.b]; break;
            case Op::Mul: s[i] = s[ins.a] * s[ins.b]; break;
            case Op::Div: {
                double d = s[ins.b];
                if (d <= 0.0) {
                    fail = i;
                    break;
                }
                s[i] = s[ins.a] / d;
                break;
            }
            case Op::Min: s[i] = s[ins.a] < s[ins.b] ? s[ins.a] : s[ins.b]; break;
            case Op::Max: s[i] = s[ins.a] > s[ins.b] ? s[ins.a] : s[ins.b]; break;
            case Op::Ramp: s[i] = s[ins.a] > 0.0 ? s[ins.a] : 0.0; break;
        }
        if (fail != std::numeric_limits<std::size_t>::max()) break;
    }
    if (fail != std::numeric_limits<std::size_t>::max())
        throw StabilityViolation(
            "stability violated: division by non-positive value",
            output_depending_on(static_cast<std::uint32_t>(fail)));
}

std::vector<double> CompiledGraph::forward(std::span<const double> x) const {
    std::vector<double> slots;
    forward_slots(x, slots);
    std::vector<double> out(outputs_.size());
    for (std::size_t o = 0; o < outputs_.size(); ++o) out[o] = slots[outputs_[o]];
    return out;
}

void CompiledGraph::backward_slots(const std::vector<double>& slots,
                                   std::span<const double> weights,
                                   std::vector<double>& grad,
                                   std::vector<double>& adj) const {
    adj.assign(instrs_.size(), 0.0);
    for (std::size_t o = 0; o < outputs_.size(); ++o)
        adj[outputs_[o]] += weights.empty() ? 1.0 : weights[o];
    const double* s = slots.data();
    double* a = adj.data();
    for (std::size_t i = instrs_.size(); i-- > 0;) {
        double w = a[i];
        if (w != 0.0) propagate_adjoint(instrs_[i], s, w, a);
    }
    grad.assign(var_count_, 0.0);
    for (std::size_t i = 0; i < instrs_.size(); ++i)
        if (instrs_[i].op == Op::Var) grad[instrs_[i].a] = a[i];
}

std::vector<double> CompiledGraph::backward(std::span<const double> x,
                                            std::span<const double> weights) const {
    std::vector<double> slots, grad, adj;
    forward_slots(x, slots);
    backward_slots(slots, weights, grad, adj);
    return grad;
}

void CompiledGraph::collect_subtape(std::uint32_t root_slot, Scratch& sc) const {
    sc.order.clear();
    ++sc.epoch;
    sc.stack.clear();
    sc.stack.emplace_back(root_slot, 0);
    while (!sc.stack.empty()) {
        auto& [idx, stage] = sc.stack.back();
        if (stage == 0) {
            stage = 1;
            if (sc.mark[idx] == sc.epoch) {
                sc.stack.pop_back();
                continue;
            }
            sc.mark[idx] = sc.epoch;
            const Instr& ins = instrs_[idx];
            if (ins.op == Op::Ramp) {
                sc.stack.emplace_back(ins.a, 0);
            } else if (ins.op != Op::Const && ins.op != Op::Var) {
                sc.stack.emplace_back(ins.a, 0);
                sc.stack.emplace_back(ins.b, 0);
            }
        } else {
            sc.order.push_back(idx);
            sc.stack.pop_back();
        }
    }
}

double CompiledGraph::eval_output(
    std::size_t output_index, std::span<const double> x, Scratch& sc,
    std::vector<std::pair<std::uint32_t, double>>& sparse_grad) const {
    const std::uint32_t root = outputs_[output_index];
    collect_subtape(root, sc);
    double* s = sc.slots.data();
    for (std::uint32_t i : sc.order) s[i] = exec_instr(instrs_[i], s, x.data());
    double value = s[root];

    double* a = sc.adj.data();
    for (std::uint32_t i : sc.order) a[i] = 0.0;
    a[root] = 1.0;
    for (std::size_t k = sc.order.size(); k-- > 0;) {
        std::uint32_t i = sc.order[k];
        double w = a[i];
        if (w != 0.0) propagate_adjoint(instrs_[i], s, w, a);
    }
    sparse_grad.clear();
    for (std::uint32_t i : sc.order)
        if (instrs_[i].op == Op::Var) sparse_grad.emplace_back(instrs_[i].a, a[i]);
    return value;
}

EvalResult CompiledGraph::eval_parallel(std::span<const double> x, int task_count,
                                        std::span<const double> weights) const {
    const int n_out = static_cast<int>(outputs_.size());
    EvalResult res;
    res.values.assign(n_out, 0.0);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> sparse(n_out);

    int error_output = std::numeric_limits<int>::max();
    std::string error_message;

#ifdef _OPENMP
    #pragma omp parallel num_threads(std::max(1, task_count)) if (task_count > 1)
    {
        Scratch sc(instrs_.size());
        #pragma omp for schedule(dynamic)
        for (int o = 0; o < n_out; ++o) {
            try {
                res.values[o] = eval_output(o, x, sc, sparse[o]);
            } catch (const StabilityViolation& e) {
                #pragma omp critical(ncsynth_eval_error)
                {
                    if (o < error_output) {
                        error_output = o;
                        error_message = e.what();
                    }
                }
            }
        }
    }
#else
    (void)task_count;
    Scratch sc(instrs_.size());
    for (int o = 0; o < n_out; ++o) {
        try {
            res.values[o] = eval_output(o, x, sc, sparse[o]);
        } catch (const StabilityViolation& e) {
            if (o < error_output) {
                error_output = o;
                error_message = e.what();
            }
        }
    }
#endif

    if (error_output != std::numeric_limits<int>::max())
        throw StabilityViolation(error_message, error_output);

    // Serial fold in output order: the per-variable summation order is the
    // same for every task count.
    res.gradient.assign(var_count_, 0.0);
    for (int o = 0; o < n_out; ++o) {
        double w = weights.empty() ? 1.0 : weights[o];
        for (auto [var, d] : sparse[o]) res.gradient[var] += w * d;
    }
    return res;
}

namespace {

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    // Host is little-endian on every supported target; bytes go out as-is.
    out.insert(out.end(), buf, buf + sizeof(T));
}

}  // namespace

std::vector<std::uint8_t> CompiledGraph::dump_tape() const {
    std::vector<std::uint8_t> out;
    out.push_back('N');
    out.push_back('C');
    out.push_back('V');
    out.push_back('M');
    append_le<std::uint32_t>(out, 1);  // version
    append_le<std::uint32_t>(out, var_count_);
    append_le<std::uint64_t>(out, instrs_.size());
    for (const Instr& ins : instrs_) {
        out.push_back(static_cast<std::uint8_t>(ins.op));
        append_le<std::uint32_t>(out, ins.a);
        append_le<std::uint32_t>(out, ins.b);
        append_le<double>(out, ins.imm);
    }
    append_le<std::uint64_t>(out, outputs_.size());
    for (std::uint32_t o : outputs_) append_le<std::uint32_t>(out, o);
    return out;
}

}  // namespace ncsynth
