/**************************************************************************
 * test_circuit.cpp
 *
 * Copyright 2026 The ftclique Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#include "ftclique/circuit.hpp"
#include "ftclique/compile.hpp"
#include "ftclique/matmul.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace ftclique;

namespace {

// Two parts, three layers: inputs, pairwise sums (crossing parts), products.
LayeredCircuit small_circuit() {
    LayeredCircuit c(2, 8, Semiring::plus_times(251));
    c.add_inputs(4);
    c.add_layer();
    c.add_gate(1, {GateFunc::Sum, {{0, 0}, {0, 2}}, {}, 0});
    c.add_gate(1, {GateFunc::Sum, {{0, 1}, {0, 3}}, {}, 0});
    c.add_gate(1, {GateFunc::LinearCombination, {{0, 2}, {0, 3}}, {2, 3}, 0});
    c.add_gate(1, {GateFunc::Copy, {{0, 3}}, {}, 0});
    c.add_layer();
    c.add_gate(2, {GateFunc::SumOfProducts, {{1, 0}, {1, 1}}, {}, 0});
    c.add_gate(2, {GateFunc::SumOfProducts, {{1, 2}, {1, 3}}, {}, 0});
    return c;
}

PartitionScheme small_scheme(const LayeredCircuit& c, std::size_t group) {
    return PartitionScheme::from_parts(c, {{{0, 1}, {2, 3}}, {{0, 1}, {2, 3}}, {{0}, {1}}}, group);
}

}  // namespace

TEST_CASE("semirings") {
    const auto p = Semiring::plus_times(7);
    CHECK(p.add(5, 4) == 2);
    CHECK(p.mul(5, 4) == 6);
    CHECK(p.zero() == 0);
    CHECK(p.one() == 1);
    const auto t = Semiring::min_plus(63);
    CHECK(t.add(5, 4) == 4);
    CHECK(t.mul(5, 4) == 9);
    CHECK(t.mul(60, 4) == 63);
    CHECK(t.mul(63, 0) == 63);
    CHECK(t.zero() == 63);
    CHECK(t.one() == 0);
}

TEST_CASE("evaluation of a hand-built circuit") {
    auto c = small_circuit();
    CHECK(validate(c).empty());
    CHECK(c.depth() == 2);
    const std::vector<Value> in{1, 2, 3, 4};
    const auto all = evaluate_all(c, in);
    CHECK(all[1] == std::vector<Value>{4, 6, 18, 4});
    CHECK(evaluate(c, in) == std::vector<Value>{24, 72});
    CHECK_THROWS(evaluate(c, std::vector<Value>{1, 2}));
}

TEST_CASE("validation") {
    LayeredCircuit single(2, 4, Semiring::plus_times(13));
    single.add_inputs(3);
    CHECK(validate(single).empty());

    auto bad = small_circuit();
    bad.add_layer();
    bad.add_gate(3, {GateFunc::Copy, {{1, 0}}, {}, 0});  // skips a layer
    CHECK_FALSE(validate(bad).empty());

    LayeredCircuit arity(2, 4, Semiring::plus_times(13));
    arity.add_inputs(2);
    arity.add_layer();
    arity.add_gate(1, {GateFunc::SumOfProducts, {{0, 0}}, {}, 0});
    CHECK_FALSE(validate(arity).empty());

    LayeredCircuit split(2, 4, Semiring::plus_times(13));
    split.add_inputs(2);
    split.add_layer();
    split.add_gate(1, {GateFunc::Copy, {{0, 0}}, {}, 0});
    split.add_gate(1, {GateFunc::Copy, {{0, 1}}, {}, 0});
    CHECK_FALSE(validate(split).empty());  // two components
}

TEST_CASE("partition scheme pieces and padding") {
    const auto c = small_circuit();
    const auto s = small_scheme(c, 2);
    CHECK(s.num_parts() == 2);
    CHECK(s.pieces(0, 0).size() == 1);
    const auto s3 = small_scheme(c, 3);
    REQUIRE(s3.pieces(0, 1).size() == 1);
    CHECK(s3.pieces(0, 1)[0] == PartitionScheme::Piece{2, 3, kVirtualGate});
    CHECK(s.part_of(1, 2) == 1);
    CHECK(s.piece_of(2, 1).first == 0);
    CHECK_THROWS_AS(PartitionScheme::from_parts(c, {{{0, 1}, {2}}, {{0, 1}, {2, 3}}, {{0}, {1}}}, 2),
                    std::invalid_argument);
}

TEST_CASE("locality counts by wire traversal") {
    const auto c = small_circuit();
    const auto s = small_scheme(c, 2);
    const auto rep = analyze_partition(c, s);
    REQUIRE(rep.layers.size() == 2);
    // Layer 1 gates 0 and 1 each read one gate of the other part.
    CHECK(rep.layers[0].max_right_fan == 2);
    CHECK(rep.layers[0].max_left_fan == 2);
    CHECK(rep.layers[0].max_source_parts == 1);
    // Products read only their own part.
    CHECK_FALSE(rep.layers[1].has_cross_wires);
    CHECK(rep.max_output_part == 1);
    const auto plan = classify_layers(c, s);
    CHECK(plan.communication_layers == std::vector<std::size_t>{1});
    CHECK(plan.checkpoint_layers == std::vector<std::size_t>{0, 2});
    REQUIRE(plan.epochs.size() == 1);
    CHECK(plan.epochs[0].end == 2);
    CHECK(plan.epochs[0].collects);
    CHECK(bin(c, s, 0, 0) == std::vector<PieceRef>{{0, 1, 0}});
    CHECK(inputs_of_part(c, s, 0, 0) == std::vector<PieceRef>{{0, 0, 0}, {0, 1, 0}});
}

TEST_CASE("semiring matrix circuit epoch plan") {
    const auto mm = build_semiring_mm_circuit(8, Semiring::plus_times(61));
    const auto plan = classify_layers(mm.circuit, mm.scheme);
    CHECK(plan.communication_layers == std::vector<std::size_t>{1, 3});
    CHECK(plan.checkpoint_layers == std::vector<std::size_t>{0, 2, 4});
    REQUIRE(plan.epochs.size() == 2);
    CHECK(plan.epochs[0].start == 0);
    CHECK(plan.epochs[0].end == 2);
    CHECK(plan.epochs[1].collects);
}

TEST_CASE("relabeling preserves evaluation and locality") {
    const auto mm = build_semiring_mm_circuit(8, Semiring::plus_times(61));
    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(5);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto moved = mm.scheme.relabeled(perm, mm.circuit);
    const auto a = analyze_partition(mm.circuit, mm.scheme), b = analyze_partition(mm.circuit, moved);
    CHECK(a.max_block_fan == b.max_block_fan);
    CHECK(a.max_bin_count == b.max_bin_count);
    CHECK(a.max_piece_count == b.max_piece_count);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].max_right_fan == b.layers[l].max_right_fan);
        CHECK(a.layers[l].min_bin_count == b.layers[l].min_bin_count);
    }
    for (std::size_t w = 0; w < 8; ++w) CHECK(moved.part(2, perm[w]) == mm.scheme.part(2, w));
}

TEST_CASE("text round trip") {
    const auto mm = build_semiring_mm_circuit(8, Semiring::min_plus(63));
    std::stringstream cs, ss;
    write_circuit(cs, mm.circuit);
    write_scheme(ss, mm.scheme);
    const auto c2 = read_circuit(cs);
    const auto s2 = read_scheme(ss, c2);
    CHECK(validate(c2).empty());
    std::mt19937_64 rng(6);
    std::vector<Value> in(mm.circuit.layer(0).size());
    for (auto& v : in) v = rng() % 64;
    CHECK(evaluate(c2, in) == evaluate(mm.circuit, in));
    for (std::size_t w = 0; w < 8; ++w) CHECK(s2.pieces(4, w) == mm.scheme.pieces(4, w));

    const auto compiled = compile_clique(echo_algorithm(4), 4, 4);
    std::stringstream opaque;
    CHECK_THROWS(write_circuit(opaque, compiled.circuit));
    std::stringstream garbage("circuit n 2 depth x");
    CHECK_THROWS(read_circuit(garbage));
}
