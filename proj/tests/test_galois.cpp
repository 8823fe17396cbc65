/**************************************************************************
 * test_galois.cpp
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

#include "ftclique/galois.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace ftclique;

namespace {

// Textbook Lagrange interpolation, evaluated point by point. Independent of
// the library's weight matrices.
Fp lagrange_at(const std::vector<IndexedSymbol>& pts, std::uint64_t x) {
    Fp acc;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Fp num{1}, den{1};
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            num *= Fp{x} - Fp{pts[j].index};
            den *= Fp{pts[i].index} - Fp{pts[j].index};
        }
        acc += pts[i].value * num * den.inverse();
    }
    return acc;
}

std::vector<std::vector<std::uint32_t>> all_subsets(std::uint32_t n, std::uint32_t k) {
    std::vector<std::vector<std::uint32_t>> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != k) continue;
        std::vector<std::uint32_t> s;
        for (std::uint32_t i = 0; i < n; ++i)
            if (mask >> i & 1) s.push_back(i);
        out.push_back(s);
    }
    return out;
}

std::vector<Fp> random_message(std::size_t k, std::mt19937_64& rng) {
    std::vector<Fp> m(k);
    for (auto& x : m) x = Fp{rng()};
    return m;
}

}  // namespace

TEST_CASE("field arithmetic") {
    std::mt19937_64 rng(1);
    const Fp minus_one{Fp::kModulus - 1};
    CHECK(minus_one + Fp{1} == Fp{});
    CHECK(Fp{Fp::kModulus} == Fp{});
    CHECK((minus_one * minus_one) == Fp{1});
    CHECK_THROWS_AS(Fp{}.inverse(), std::domain_error);
    for (int i = 0; i < 200; ++i) {
        Fp a{rng()}, b{rng()}, c{rng()};
        CHECK(a * (b + c) == a * b + a * c);
        CHECK((a - b) + b == a);
        if (a != Fp{}) CHECK(a * a.inverse() == Fp{1});
        CHECK(a.pow(Fp::kModulus - 1) == (a == Fp{} ? Fp{} : Fp{1}));
    }
}

TEST_CASE("code parameters") {
    const auto p = CodeParams::make(8, 2);
    CHECK(p.length == 8);
    CHECK(p.message_length == 4);
    CHECK(p.distance == 5);
    CHECK_THROWS_AS(CodeParams::make(8, 3), std::invalid_argument);
    CHECK_THROWS_AS(CodeParams::make(8, 0), std::invalid_argument);
    CHECK(CodeParams::make(64, 4).distance == 49);
}

TEST_CASE("systematic encoding and Lagrange oracle over every erasure pattern") {
    std::mt19937_64 rng(2);
    const auto params = CodeParams::make(8, 2);
    const ReedSolomon code(params);
    const auto patterns = all_subsets(8, 4);
    REQUIRE(patterns.size() == 70);
    for (int trial = 0; trial < 10; ++trial) {
        const auto msg = random_message(4, rng);
        const auto cw = code.encode(msg);
        REQUIRE(cw.size() == 8);
        CHECK(std::equal(msg.begin(), msg.end(), cw.begin()));
        std::vector<IndexedSymbol> base;
        for (std::uint32_t i = 0; i < 4; ++i) base.push_back({i, msg[i]});
        for (std::uint32_t x = 4; x < 8; ++x) CHECK(cw[x] == lagrange_at(base, x));
        for (const auto& set : patterns) {
            std::vector<IndexedSymbol> symbols;
            for (auto i : set) symbols.push_back({i, cw[i]});
            const auto got = code.decode(symbols);
            for (std::uint32_t t = 0; t < 4; ++t) CHECK(got[t] == lagrange_at(symbols, t));
            CHECK(got == msg);
        }
    }
}

TEST_CASE("minimum distance") {
    std::mt19937_64 rng(3);
    for (auto [n, c] : {std::pair{8, 2}, {16, 4}, {16, 2}}) {
        const auto params = CodeParams::make(n, c);
        const ReedSolomon code(params);
        for (int trial = 0; trial < 50; ++trial) {
            auto a = random_message(params.message_length, rng);
            auto b = a;
            // Differ in one or more message symbols.
            b[rng() % b.size()] += Fp{1 + rng() % 1000};
            const auto ca = code.encode(a), cb = code.encode(b);
            std::size_t diff = 0;
            for (std::size_t i = 0; i < ca.size(); ++i) diff += ca[i] != cb[i];
            CHECK(diff >= params.distance);
        }
        // A weight-d codeword exists: interpolate K-1 zeros plus one point.
        std::vector<IndexedSymbol> pts;
        for (std::uint32_t i = 0; i + 1 < params.message_length; ++i) pts.push_back({i, Fp{}});
        pts.push_back({static_cast<std::uint32_t>(params.message_length - 1), Fp{1}});
        const auto cw = code.encode(code.decode(pts));
        const auto weight = std::count_if(cw.begin(), cw.end(), [](Fp v) { return v != Fp{}; });
        CHECK(static_cast<std::size_t>(weight) <= params.distance);
    }
}

TEST_CASE("decode rejects bad shard sets") {
    const auto params = CodeParams::make(8, 2);
    const ReedSolomon code(params);
    std::vector<IndexedSymbol> few{{0, Fp{1}}, {1, Fp{2}}, {2, Fp{3}}};
    CHECK_THROWS_AS(code.decode(few), DecodeError);
    std::vector<IndexedSymbol> dup{{0, Fp{1}}, {0, Fp{1}}, {2, Fp{3}}, {3, Fp{4}}};
    CHECK_THROWS_AS(code.decode(dup), DecodeError);
    std::vector<IndexedSymbol> range{{0, Fp{1}}, {9, Fp{1}}, {2, Fp{3}}, {3, Fp{4}}};
    CHECK_THROWS_AS(code.decode(range), DecodeError);
    CHECK_THROWS_AS(code.encode(std::vector<Fp>(3)), std::invalid_argument);
}

TEST_CASE("state packing and interleaving") {
    CHECK(symbols_per_element(6) == 10);
    CHECK(symbols_per_element(60) == 1);
    CHECK_THROWS_AS(symbols_per_element(61), std::invalid_argument);
    const auto params = CodeParams::make(8, 2);
    // header + ceil(16 / 20) elements fit one instance of K = 4
    CHECK(interleave_width(16, params, 3) == 1);
    CHECK(interleave_width(100, params, 6) == 3);
    CHECK(interleave_width(0, params, 6) == 0);

    std::mt19937_64 rng(4);
    for (std::size_t len : {0u, 1u, 7u, 40u, 200u}) {
        std::vector<std::uint64_t> state(len);
        for (auto& v : state) v = rng() & 63;
        auto shards = encode_state(state, params, 6);
        REQUIRE(shards.size() == 8);
        for (const auto& sh : shards) CHECK(sh.payload.size() == interleave_width(len, params, 6));
        // Drop four shards at random; any four survivors decode.
        std::shuffle(shards.begin(), shards.end(), rng);
        shards.resize(4);
        CHECK(decode_state(shards, params, 6) == state);
    }
    std::vector<std::uint64_t> wide{64};
    CHECK_THROWS_AS(encode_state(wide, params, 6), std::invalid_argument);
}
