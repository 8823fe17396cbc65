/**************************************************************************
 * workload.cpp
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

#include "ftclique/cli.hpp"
#include "ftclique/compile.hpp"
#include "ftclique/matmul.hpp"

#include <random>
#include <stdexcept>

namespace ftclique {

namespace {

Matrix random_matrix(std::size_t n, std::uint64_t below, std::mt19937_64& rng) {
    Matrix m(n);
    std::uniform_int_distribution<std::uint64_t> pick(0, below - 1);
    for (auto& v : m.data) v = pick(rng);
    return m;
}

void from_mm(Workload& w, MMCircuit mm, const Matrix& a, const Matrix& b, const Semiring& s) {
    w.inputs = circuit_inputs(mm, a, b);
    for (const auto& e : mm.input_entries) w.initial_owner.push_back(initial_owner(e));
    const Matrix c = naive_mm(a, b, s);
    for (const auto& [row, col] : mm.output) w.expected.push_back(c(row, col));
    w.circuit = std::move(mm.circuit);
    w.scheme = std::move(mm.scheme);
}

}  // namespace

std::vector<std::string> workload_names() {
    return {"semiring-mm:plus-times", "semiring-mm:tropical", "fast-mm:trivial", "fast-mm:strassen",
            "clique:echo",            "clique:sum-broadcast", "clique:prefix-sum"};
}

Workload make_workload(const std::string& name, std::size_t n, double chi, unsigned b, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    const unsigned bits = alphabet_bits_for(n, b);
    if (bits > 60) throw std::invalid_argument("alphabet wider than 60 bits; lower --b");
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL);
    Workload w;
    w.name = name;
    const std::uint64_t top = std::uint64_t{1} << bits;

    if (name == "semiring-mm:plus-times" || name == "semiring-mm:tropical") {
        const bool tropical = name == "semiring-mm:tropical";
        const Semiring s = tropical ? Semiring::min_plus(top - 1)
                                    : Semiring::plus_times(largest_prime_at_most(top));
        const std::size_t group = chi >= 1.0 ? n : group_size_for(n, chi);
        auto mm = build_semiring_mm_circuit(n, s, group);
        // Tropical entries include the occasional +infinity.
        const std::uint64_t below = tropical ? s.param + 1 : s.param;
        const Matrix a = random_matrix(n, below, rng), bm = random_matrix(n, below, rng);
        from_mm(w, std::move(mm), a, bm, s);
        return w;
    }
    if (name == "fast-mm:trivial" || name == "fast-mm:strassen") {
        MMTensor t;
        if (name == "fast-mm:strassen") {
            t = strassen_tensor();
        } else {
            auto m = exact_root(n, 3);
            if (!m) throw std::invalid_argument("fast-mm:trivial needs n = m^3 (rank of the trivial tensor)");
            t = trivial_tensor(*m);
        }
        const Semiring ring = Semiring::plus_times(largest_prime_at_most(top));
        auto mm = build_fast_mm_circuit(n, t, ring, chi);
        const Matrix a = random_matrix(n, ring.param, rng), bm = random_matrix(n, ring.param, rng);
        from_mm(w, std::move(mm), a, bm, ring);
        return w;
    }
    if (name.rfind("clique:", 0) == 0) {
        if (chi < 1.0) throw std::invalid_argument("compiled Clique circuits use pieces of n gates; use chi = 1");
        const auto alg = sample_algorithm(name.substr(7), n, bits);
        auto compiled = compile_clique(alg, n, bits);
        std::vector<std::vector<Value>> per_node(n, std::vector<Value>(n));
        std::uniform_int_distribution<std::uint64_t> pick(0, top - 1);
        for (auto& row : per_node)
            for (auto& v : row) v = pick(rng);
        w.inputs = flatten(per_node);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w.initial_owner.push_back(static_cast<std::uint32_t>(i));
        w.expected = flatten(run_clique_directly(alg, per_node, bits));
        w.circuit = std::move(compiled.circuit);
        w.scheme = std::move(compiled.scheme);
        return w;
    }
    throw std::invalid_argument("unknown workload '" + name + "'");
}

}  // namespace ftclique
