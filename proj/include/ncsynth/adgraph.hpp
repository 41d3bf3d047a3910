// adgraph.hpp - Instruction tape with forward evaluation and reverse-mode gradients.
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

#ifndef NCSYNTH_ADGRAPH_HPP
#define NCSYNTH_ADGRAPH_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ncsynth/expr.hpp"

namespace ncsynth {

// One tape instruction. Operands are slot indices of earlier instructions;
// Var stores the variable index in `a`, Const stores its value in `imm`.
struct Instr {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double imm = 0.0;
};

struct EvalResult {
    std::vector<double> values;    // one per output
    std::vector<double> gradient;  // sum over outputs of weight * doutput/dx
};

// A topologically ordered instruction tape compiled from an expression DAG.
// Compilation is deterministic (stable by node id), so the same DAG always
// yields byte-identical tapes. The graph is immutable after compile and can
// be shared across threads; every evaluation owns its buffers.
//
// Gradient conventions: min/max route the adjoint by operand comparison with
// ties going to the first operand (Heaviside with H(0) = 1); ramp passes the
// adjoint iff its operand is >= 0.
class CompiledGraph {
public:
    static CompiledGraph compile(const ExprPool& pool, std::span<const ExprId> roots);

    std::size_t instruction_count() const { return instrs_.size(); }
    std::uint32_t variable_count() const { return var_count_; }
    std::size_t output_count() const { return outputs_.size(); }
    std::uint32_t output_slot(std::size_t o) const { return outputs_[o]; }
    const std::vector<Instr>& instructions() const { return instrs_; }

    // Evaluates every output. Throws StabilityViolation (with the first
    // affected output id) when a division sees a non-positive denominator.
    std::vector<double> forward(std::span<const double> x) const;

    // Same, keeping all slot values for a subsequent backward pass. `slots`
    // is resized as needed and may be reused across calls.
    void forward_slots(std::span<const double> x, std::vector<double>& slots) const;

    // Reverse-mode accumulation of sum_i weights[i] * output_i, reading the
    // slot values of a completed forward pass. Adjoints accumulate in fixed
    // tape order, so results do not depend on anything but (x, weights).
    void backward_slots(const std::vector<double>& slots,
                        std::span<const double> weights, std::vector<double>& grad,
                        std::vector<double>& adj) const;

    // Convenience: forward + backward with fresh buffers.
    std::vector<double> backward(std::span<const double> x,
                                 std::span<const double> weights) const;

    // Evaluates outputs (values and gradient) with `task_count` parallel
    // tasks, one independent sub-tape per output. Results are bitwise
    // identical for any task count: each output is computed hermetically and
    // per-variable gradient contributions are folded serially in output
    // order. Empty `weights` means unit weight per output.
    EvalResult eval_parallel(std::span<const double> x, int task_count,
                             std::span<const double> weights = {}) const;

    // Versioned little-endian binary dump of the tape, for debugging only.
    std::vector<std::uint8_t> dump_tape() const;

private:
    // Scratch buffers for per-output (sub-tape) evaluation.
    struct Scratch {
        explicit Scratch(std::size_t n)
            : slots(n), adj(n), mark(n, 0), order() {}
        std::vector<double> slots;
        std::vector<double> adj;
        std::vector<std::uint32_t> mark;  // epoch marking, avoids clears
        std::uint32_t epoch = 0;
        std::vector<std::uint32_t> order;  // post-order sub-tape
        std::vector<std::pair<std::uint32_t, std::uint8_t>> stack;
    };

    void collect_subtape(std::uint32_t root_slot, Scratch& sc) const;
    double eval_output(std::size_t output_index, std::span<const double> x,
                       Scratch& sc,
                       std::vector<std::pair<std::uint32_t, double>>& sparse_grad) const;
    int output_depending_on(std::uint32_t slot) const;

    std::vector<Instr> instrs_;
    std::vector<std::uint32_t> outputs_;
    std::uint32_t var_count_ = 0;
};

}  // namespace ncsynth

#endif  // NCSYNTH_ADGRAPH_HPP
