/**************************************************************************
 * test_matmul.cpp
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
#include "ftclique/matmul.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace ftclique;

namespace {

Matrix random_matrix(std::size_t n, Value bound, std::mt19937_64& rng) {
    Matrix m(n);
    for (auto& v : m.data) v = rng() % bound;
    return m;
}

// Independent reference: plain triple loop with explicit modular arithmetic.
Matrix reference_mod(const Matrix& a, const Matrix& b, std::uint64_t p) {
    Matrix c(a.dim);
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t j = 0; j < a.dim; ++j) {
            std::uint64_t acc = 0;
            for (std::size_t k = 0; k < a.dim; ++k) acc = (acc + a(i, k) * b(k, j)) % p;
            c(i, j) = acc;
        }
    return c;
}

Matrix reference_min_plus(const Matrix& a, const Matrix& b, Value inf) {
    Matrix c(a.dim, inf);
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t j = 0; j < a.dim; ++j)
            for (std::size_t k = 0; k < a.dim; ++k) {
                if (a(i, k) >= inf || b(k, j) >= inf) continue;
                c(i, j) = std::min<Value>(c(i, j), std::min<Value>(inf, a(i, k) + b(k, j)));
            }
    return c;
}

}  // namespace

TEST_CASE("roots and primes") {
    CHECK(exact_root(27, 3) == 3u);
    CHECK(exact_root(64, 2) == 8u);
    CHECK_FALSE(exact_root(9, 3).has_value());
    CHECK(largest_prime_at_most(64) == 61);
    CHECK(largest_prime_at_most(8) == 7);
    CHECK(largest_prime_at_most(2) == 2);
}

TEST_CASE("naive product against reference") {
    std::mt19937_64 rng(7);
    const auto a = random_matrix(5, 61, rng), b = random_matrix(5, 61, rng);
    CHECK(naive_mm(a, b, Semiring::plus_times(61)) == reference_mod(a, b, 61));
    CHECK(naive_mm(a, Matrix::identity(5, Semiring::plus_times(61)), Semiring::plus_times(61)) == a);
    CHECK_THROWS_AS(naive_mm(Matrix(3), Matrix(4), Semiring::plus_times(61)), std::invalid_argument);
}

TEST_CASE("semiring circuit computes the product") {
    std::mt19937_64 rng(8);
    for (std::size_t n : {8u, 27u}) {
        const unsigned bits = n == 8 ? 3 : 5;
        const Value top = Value{1} << bits;
        for (const auto& s : {Semiring::plus_times(largest_prime_at_most(top)), Semiring::min_plus(top - 1)}) {
            CAPTURE(n);
            const auto mm = build_semiring_mm_circuit(n, s);
            CHECK(validate(mm.circuit).empty());
            CHECK(mm.circuit.depth() == 4);
            for (int trial = 0; trial < 3; ++trial) {
                const auto a = random_matrix(n, s.max_value() + 1, rng);
                const auto b = random_matrix(n, s.max_value() + 1, rng);
                const auto c = assemble_output(mm, evaluate(mm.circuit, circuit_inputs(mm, a, b)));
                if (s.kind == Semiring::Kind::MinPlus)
                    CHECK(c == reference_min_plus(a, b, s.param));
                else
                    CHECK(c == reference_mod(a, b, s.param));
            }
        }
    }
    CHECK_THROWS_WITH_AS(build_semiring_mm_circuit(9, Semiring::plus_times(7)),
                         doctest::Contains("perfect cube"), std::invalid_argument);
}

TEST_CASE("semiring circuit locality") {
    const auto mm = build_semiring_mm_circuit(8, Semiring::plus_times(7));
    const auto rep = analyze_partition(mm.circuit, mm.scheme);
    // 2n^2 input entries spread evenly over n parts.
    CHECK(mm.scheme.part(0, 0).size() == 16);
    CHECK(rep.max_output_part <= 8);
    CHECK(mm.communication_layers == std::vector<std::size_t>{1, 3});
    const auto owners = distribute_matrix_inputs(Matrix(8, 1), Matrix(8, 2));
    REQUIRE(owners.size() == 8);
    CHECK(owners[3].size() == 16);
}

TEST_CASE("bilinear tensors") {
    const auto ring = Semiring::plus_times(1000003);
    std::mt19937_64 rng(9);
    const auto st = strassen_tensor();
    CHECK(st.rank == 7);
    CHECK(st.sigma() == doctest::Approx(std::log2(7.0)));
    const auto tr = trivial_tensor(3);
    CHECK(tr.rank == 27);
    CHECK(tr.sigma() == doctest::Approx(3.0));
    CHECK(ring_coefficient(-1, ring) == 1000002);
    for (const auto& t : {st, tr, trivial_tensor(2)}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto x = random_matrix(t.m, 1000003, rng), y = random_matrix(t.m, 1000003, rng);
            CHECK(apply_tensor(t, x, y, ring) == reference_mod(x, y, 1000003));
        }
    }
    CHECK_THROWS(apply_tensor(st, Matrix(2), Matrix(2), Semiring::min_plus(7)));
    CHECK_THROWS(tensor_by_name("winograd", 2));
}

TEST_CASE("fast circuit computes the product") {
    const auto ring = Semiring::plus_times(61);
    const auto t = trivial_tensor(4);
    const auto mm = build_fast_mm_circuit(64, t, ring);
    CHECK(validate(mm.circuit).empty());
    CHECK(mm.circuit.depth() == 5);
    std::mt19937_64 rng(10);
    const auto a = random_matrix(64, 61, rng), b = random_matrix(64, 61, rng);
    CHECK(assemble_output(mm, evaluate(mm.circuit, circuit_inputs(mm, a, b))) == reference_mod(a, b, 61));
    CHECK(effective_chi(0.5, t) == doctest::Approx(1.0 / 3.0 > 0.5 ? 1.0 / 3.0 : 0.5));
    CHECK_THROWS_AS(build_fast_mm_circuit(64, strassen_tensor(), ring), std::invalid_argument);
    CHECK(group_size_for(64, 0.5) == 8);
    CHECK_THROWS_AS(group_size_for(27, 0.5), std::invalid_argument);
}
