// test_minplus.cpp - Closed forms against the grid oracle and algebraic laws.
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
#include "ncsynth/minplus.hpp"
#include "ncsynth/rng.hpp"
#include "oracles.hpp"

using namespace ncsynth;
using namespace ncsynth::testing;

namespace {

double eval(const ExprPool& pool, ExprId id) { return pool.interpret(id, {}); }

}  // namespace

TEST_CASE("aggregate sums rates and bursts") {
    ExprPool pool;
    auto a = aggregate(pool, sym_curve(pool, 1, 2), sym_curve(pool, 3, 4));
    CHECK(eval(pool, a.rate) == doctest::Approx(4.0));
    CHECK(eval(pool, a.burst) == doctest::Approx(6.0));

    auto ident = aggregate(pool, sym_curve(pool, 5, 7), sym_curve(pool, 0, 0));
    CHECK(eval(pool, ident.rate) == doctest::Approx(5.0));
    CHECK(eval(pool, ident.burst) == doctest::Approx(7.0));

    // n-fold aggregation of identical curves.
    auto sum = sym_curve(pool, 0.5, 0.25);
    for (int i = 1; i < 8; ++i) sum = aggregate(pool, sum, sym_curve(pool, 0.5, 0.25));
    CHECK(eval(pool, sum.rate) == doctest::Approx(4.0));
    CHECK(eval(pool, sum.burst) == doctest::Approx(2.0));
}

TEST_CASE("aggregate is commutative and associative in value") {
    ExprPool pool;
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        auto a = sym_curve(pool, uniform_in(rng, 0, 5), uniform_in(rng, 0, 5));
        auto b = sym_curve(pool, uniform_in(rng, 0, 5), uniform_in(rng, 0, 5));
        auto c = sym_curve(pool, uniform_in(rng, 0, 5), uniform_in(rng, 0, 5));
        auto ab = aggregate(pool, a, b);
        auto ba = aggregate(pool, b, a);
        CHECK(std::fabs(eval(pool, ab.rate) - eval(pool, ba.rate)) <= 1e-12);
        CHECK(std::fabs(eval(pool, ab.burst) - eval(pool, ba.burst)) <= 1e-12);
        auto ab_c = aggregate(pool, ab, c);
        auto a_bc = aggregate(pool, a, aggregate(pool, b, c));
        CHECK(std::fabs(eval(pool, ab_c.rate) - eval(pool, a_bc.rate)) <= 1e-12);
        CHECK(std::fabs(eval(pool, ab_c.burst) - eval(pool, a_bc.burst)) <= 1e-12);
    }
}

TEST_CASE("convolve takes the min rate and adds latencies") {
    ExprPool pool;
    auto c = convolve(pool, sym_service(pool, 10, 1), sym_service(pool, 8, 2));
    CHECK(eval(pool, c.rate) == doctest::Approx(8.0));
    CHECK(eval(pool, c.latency) == doctest::Approx(3.0));

    // Infinite-rate sentinel is the identity element.
    auto ident = convolve(pool, sym_service(pool, 9, 1.5),
                          sym_service(pool, kInfiniteRate, 0));
    CHECK(eval(pool, ident.rate) == doctest::Approx(9.0));
    CHECK(eval(pool, ident.latency) == doctest::Approx(1.5));

    // Equal-rate tie.
    auto tie = convolve(pool, sym_service(pool, 5, 0), sym_service(pool, 5, 4));
    CHECK(eval(pool, tie.rate) == doctest::Approx(5.0));
    CHECK(eval(pool, tie.latency) == doctest::Approx(4.0));
}

TEST_CASE("deconvolve inflates the burst by rate * latency") {
    ExprPool pool;
    auto d = deconvolve(pool, sym_curve(pool, 2, 5), sym_service(pool, 10, 3));
    CHECK(eval(pool, d.rate) == doctest::Approx(2.0));
    CHECK(eval(pool, d.burst) == doctest::Approx(11.0));

    auto null = deconvolve(pool, sym_curve(pool, 0, 0), sym_service(pool, 10, 3));
    CHECK(eval(pool, null.rate) == doctest::Approx(0.0));
    CHECK(eval(pool, null.burst) == doctest::Approx(0.0));

    auto zl = deconvolve(pool, sym_curve(pool, 2, 5), sym_service(pool, 10, 0));
    CHECK(eval(pool, zl.burst) == doctest::Approx(5.0));
}

TEST_CASE("leftover residual service") {
    ExprPool pool;
    auto l = leftover(pool, sym_service(pool, 10, 2), sym_curve(pool, 4, 6));
    CHECK(eval(pool, l.rate) == doctest::Approx(6.0));
    CHECK(eval(pool, l.latency) == doctest::Approx(26.0 / 6.0));

    auto full = leftover(pool, sym_service(pool, 10, 2), sym_curve(pool, 0, 0));
    CHECK(eval(pool, full.rate) == doctest::Approx(10.0));
    CHECK(eval(pool, full.latency) == doctest::Approx(2.0));

    // Stability boundary r = R errors out.
    CHECK_THROWS_AS(leftover(pool, sym_service(pool, 10, 2), sym_curve(pool, 10, 1)),
                    StabilityViolation);
}

TEST_CASE("delay bound h = B/R + L") {
    ExprPool pool;
    CHECK(eval(pool, delay_bound(pool, sym_curve(pool, 2, 5), sym_service(pool, 10, 3))) ==
          doctest::Approx(3.5));
    CHECK(eval(pool, delay_bound(pool, sym_curve(pool, 3, 0), sym_service(pool, 10, 0))) ==
          doctest::Approx(0.0));
    CHECK(eval(pool, delay_bound(pool, sym_curve(pool, 1, 2), sym_service(pool, 10, 3))) ==
          doctest::Approx(3.2));
}

TEST_CASE("scale multiplies both parameters") {
    ExprPool pool;
    auto base = sym_curve(pool, 2, 4);
    auto off = scale(pool, base, pool.constant(0.0));
    CHECK(eval(pool, off.rate) == doctest::Approx(0.0));
    CHECK(eval(pool, off.burst) == doctest::Approx(0.0));
    auto on = scale(pool, base, pool.constant(1.0));
    CHECK(eval(pool, on.rate) == doctest::Approx(2.0));
    CHECK(eval(pool, on.burst) == doctest::Approx(4.0));
    auto half = scale(pool, base, pool.constant(0.5));
    CHECK(eval(pool, half.rate) == doctest::Approx(1.0));
    CHECK(eval(pool, half.burst) == doctest::Approx(2.0));
}

TEST_CASE("scale composes multiplicatively") {
    ExprPool pool;
    Rng rng(13);
    for (int i = 0; i < 30; ++i) {
        double p = uniform01(rng), q = uniform01(rng);
        auto base = sym_curve(pool, uniform_in(rng, 0, 3), uniform_in(rng, 0, 3));
        auto twice = scale(pool, scale(pool, base, pool.constant(p)), pool.constant(q));
        auto once = scale(pool, base, pool.constant(p * q));
        CHECK(eval(pool, twice.rate) == doctest::Approx(eval(pool, once.rate)).epsilon(1e-12));
        CHECK(eval(pool, twice.burst) ==
              doctest::Approx(eval(pool, once.burst)).epsilon(1e-12));
    }
}

TEST_CASE("grid oracle certifies the frozen examples") {
    // convolution of beta(10,1) and beta(8,2) at t=5 equals beta(8,3)(5)=16
    NumTokenBucket probe{1.0, 1.0};
    NumRateLatency b1{10, 1}, b2{8, 2};
    Grid g = make_grid(probe, b1, b2);
    // Use a grid whose points land exactly on t=5: delta from horizon won't,
    // so evaluate with an explicit grid.
    Grid g5{0.005, 1001};  // horizon 5
    auto conv = grid_convolution(b1, b2, g5);
    CHECK(conv.back() == doctest::Approx(16.0).epsilon(1e-9));
    (void)g;

    // deconvolution of gamma(2,5) by beta(10,3) at t=0 is 11, up to the
    // grid discretization error (the maximizer u = L sits off-grid).
    NumTokenBucket a{2, 5};
    NumRateLatency b{10, 3};
    Grid gd = make_grid(a, b, b);
    auto dec = grid_deconvolution(a, b, gd);
    CHECK(std::fabs(dec[0] - 11.0) <= (a.r + b.R) * gd.delta);

    // delay of (gamma(2,5), beta(10,3)) within 2 grid steps of 3.5
    double d = grid_delay(a, b, gd);
    CHECK(std::fabs(d - 3.5) <= 2.0 * gd.delta);
}

TEST_CASE("closed forms match the grid oracle on random operand pairs") {
    Rng rng(42);
    ExprPool pool;
    for (int trial = 0; trial < 60; ++trial) {
        NumRateLatency b1{uniform_in(rng, 1, 20), uniform_in(rng, 0, 3)};
        NumRateLatency b2{uniform_in(rng, 1, 20), uniform_in(rng, 0, 3)};
        double min_rate = std::min(b1.R, b2.R);
        NumTokenBucket a{uniform_in(rng, 0, 0.9) * min_rate, uniform_in(rng, 0, 5)};
        Grid grid = make_grid(a, b1, b2);

        auto conv = grid_convolution(b1, b2, grid);
        auto sconv = convolve(pool, sym_service(pool, b1.R, b1.L),
                              sym_service(pool, b2.R, b2.L));
        NumRateLatency closed_conv{pool.interpret(sconv.rate, {}),
                                   pool.interpret(sconv.latency, {})};
        double tol = (b1.R + b2.R) * grid.delta + 1e-9;
        for (int i = 0; i < grid.points; ++i) {
            double diff = conv[i] - closed_conv(i * grid.delta);
            CHECK(diff >= -1e-9);  // grid inf never undershoots the true inf
            CHECK(diff <= tol);
        }

        auto dec = grid_deconvolution(a, b1, grid);
        auto sdec = deconvolve(pool, sym_curve(pool, a.r, a.B),
                               sym_service(pool, b1.R, b1.L));
        NumTokenBucket closed_dec{pool.interpret(sdec.rate, {}),
                                  pool.interpret(sdec.burst, {})};
        tol = (a.r + b1.R) * grid.delta + 1e-9;
        for (int i = 0; i < grid.points; ++i) {
            double diff = closed_dec(i * grid.delta) - dec[i];
            CHECK(diff >= -1e-9);  // grid sup never overshoots
            CHECK(diff <= tol);
        }

        auto left = grid_leftover(b1, a, grid);
        auto sleft = leftover(pool, sym_service(pool, b1.R, b1.L),
                              sym_curve(pool, a.r, a.B));
        NumRateLatency closed_left{pool.interpret(sleft.rate, {}),
                                   pool.interpret(sleft.latency, {})};
        tol = (a.r + b1.R) * grid.delta + 1e-9;
        for (int i = 0; i < grid.points; ++i) {
            double diff = closed_left(i * grid.delta) - left[i];
            CHECK(diff >= -1e-9);
            CHECK(diff <= tol);
        }

        double d = grid_delay(a, b1, grid);
        double closed_delay = a.B / b1.R + b1.L;
        CHECK(d >= 0.0);
        CHECK(std::fabs(d - closed_delay) <= 2.0 * grid.delta + 1e-9);
    }
}

TEST_CASE("results preserve curve invariants under admissible assignments") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        ExprPool pool;
        double p1 = uniform01(rng), p2 = uniform01(rng);
        ExprId v0 = pool.variable(0), v1 = pool.variable(1);
        auto a1 = scale(pool, sym_curve(pool, uniform_in(rng, 0, 2), uniform_in(rng, 0, 2)), v0);
        auto a2 = scale(pool, sym_curve(pool, uniform_in(rng, 0, 2), uniform_in(rng, 0, 2)), v1);
        auto agg = aggregate(pool, a1, a2);
        auto b = sym_service(pool, uniform_in(rng, 5, 10), uniform_in(rng, 0, 1));
        auto lo = leftover(pool, b, agg);
        auto out = deconvolve(pool, agg, lo);
        std::vector<double> x{p1, p2};
        CHECK(pool.interpret(agg.rate, x) >= 0.0);
        CHECK(pool.interpret(agg.burst, x) >= 0.0);
        CHECK(pool.interpret(lo.rate, x) > 0.0);
        CHECK(pool.interpret(lo.latency, x) >= 0.0);
        CHECK(pool.interpret(out.rate, x) >= 0.0);
        CHECK(pool.interpret(out.burst, x) >= 0.0);
    }
}
