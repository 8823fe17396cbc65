/**************************************************************************
 * test_compile.cpp
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

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace ftclique;

namespace {

std::vector<std::vector<Value>> random_inputs(std::size_t n, unsigned bits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Value>> in(n, std::vector<Value>(n));
    for (auto& row : in)
        for (auto& v : row) v = rng() & ((Value{1} << bits) - 1);
    return in;
}

}  // namespace

TEST_CASE("alphabet width") {
    CHECK(alphabet_bits_for(8, 1) == 3);
    CHECK(alphabet_bits_for(27, 1) == 5);
    CHECK(alphabet_bits_for(64, 2) == 12);
    CHECK(alphabet_bits_for(2, 1) == 1);
}

TEST_CASE("compiled circuit matches direct execution") {
    for (std::size_t n : {4u, 8u}) {
        const unsigned bits = alphabet_bits_for(n, 2);
        for (const char* name : {"echo", "sum-broadcast", "prefix-sum"}) {
            CAPTURE(name);
            CAPTURE(n);
            const auto alg = sample_algorithm(name, n, bits);
            const auto compiled = compile_clique(alg, n, bits);
            CHECK(validate(compiled.circuit).empty());
            CHECK(compiled.circuit.depth() == 2 * alg.rounds + 1);
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                const auto in = random_inputs(n, bits, seed);
                const auto direct = run_clique_directly(alg, in, bits);
                CHECK(evaluate(compiled.circuit, flatten(in)) == flatten(direct));
            }
        }
    }
}

TEST_CASE("echo semantics and locality") {
    const std::size_t n = 4;
    const auto alg = echo_algorithm(n);
    std::vector<std::vector<Value>> in(n, std::vector<Value>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) in[i][j] = i * n + j;
    const auto out = run_clique_directly(alg, in, 4);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) CHECK(out[i][j] == in[j][i]);

    const auto compiled = compile_clique(alg, n, 4);
    const auto rep = analyze_partition(compiled.circuit, compiled.scheme);
    CHECK(rep.max_block_fan == n - 1);
    const auto plan = classify_layers(compiled.circuit, compiled.scheme);
    CHECK(plan.communication_layers == std::vector<std::size_t>{2});
}

TEST_CASE("oversized messages are rejected") {
    const auto alg = echo_algorithm(4);
    std::vector<std::vector<Value>> in(4, std::vector<Value>(4, 1));
    in[2][1] = 16;
    CHECK_THROWS_AS(run_clique_directly(alg, in, 4), std::length_error);
    CHECK_THROWS_AS(sample_algorithm("gossip", 4, 4), std::invalid_argument);
}
