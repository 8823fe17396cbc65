/**************************************************************************
 * compile.cpp
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

#include "ftclique/compile.hpp"

#include <bit>
#include <memory>
#include <stdexcept>

namespace ftclique {

unsigned alphabet_bits_for(std::size_t n, unsigned b) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    const unsigned log = std::bit_width(n - 1);  // ceil(log2 n)
    return b * log;
}

namespace {

// Circuit layer 2l' stores (newest inbox, ..., oldest inbox, inputs); the
// algorithm expects (inputs, round 1, ..., round l'). Both are blocks of n.
std::vector<Value> canonical_state(std::span<const Value> layer_state, std::size_t n) {
    const std::size_t blocks = layer_state.size() / n;
    std::vector<Value> out;
    out.reserve(layer_state.size());
    for (std::size_t b = blocks; b-- > 0;)
        out.insert(out.end(), layer_state.begin() + b * n, layer_state.begin() + (b + 1) * n);
    return out;
}

void check_messages(const std::vector<Value>& msgs, std::size_t n, unsigned bits) {
    if (msgs.size() != n)
        throw std::length_error("node emitted " + std::to_string(msgs.size()) + " messages, expected " +
                                std::to_string(n));
    for (Value m : msgs)
        if (m >> bits)
            throw std::length_error("message " + std::to_string(m) + " exceeds " +
                                    std::to_string(bits) + " bits");
}

}  // namespace

CompiledCircuit compile_clique(const CliqueAlgorithm& alg, std::size_t n, unsigned alphabet_bits) {
    if (n < 2) throw std::invalid_argument("compile_clique: n must be at least 2");
    if (!alg.output_fn || (alg.rounds > 0 && !alg.message_fn))
        throw std::invalid_argument("compile_clique: algorithm callbacks missing");
    const std::size_t T = alg.rounds, M = alg.output_size;
    const auto algo = std::make_shared<const CliqueAlgorithm>(alg);
    LayeredCircuit c(n, alphabet_bits, Semiring::plus_times(std::uint64_t{1} << alphabet_bits));
    std::vector<std::vector<std::vector<std::uint32_t>>> parts;

    auto add_part_layer = [&](std::size_t per_part) {
        const std::size_t l = c.add_layer();
        parts.emplace_back(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < per_part; ++j)
                parts[l][i].push_back(static_cast<std::uint32_t>(i * per_part + j));
        return l;
    };
    auto wire = [](std::size_t layer, std::size_t index) {
        return Wire{static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(index)};
    };

    add_part_layer(n);
    c.add_inputs(n * n);
    std::size_t prev_size = n;  // gates per part in the previous layer

    for (std::size_t r = 1; r <= T; ++r) {
        // outbox layer 2r - 1
        const std::size_t lo = add_part_layer(n + prev_size);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const auto id = c.register_opaque(
                    [algo, n, i, j, r, alphabet_bits](std::span<const Value> in) -> Value {
                        const auto state = canonical_state(in, n);
                        const auto msgs = algo->message_fn(i, r, state);
                        check_messages(msgs, n, alphabet_bits);
                        return msgs[j];
                    });
                Gate g{GateFunc::Opaque, {}, {}, id};
                for (std::size_t k = 0; k < prev_size; ++k) g.in.push_back(wire(lo - 1, i * prev_size + k));
                c.add_gate(lo, std::move(g));
            }
            for (std::size_t k = 0; k < prev_size; ++k)
                c.add_gate(lo, Gate{GateFunc::Copy, {wire(lo - 1, i * prev_size + k)}, {}, 0});
        }
        const std::size_t out_size = n + prev_size;
        // inbox layer 2r
        const std::size_t li = add_part_layer(out_size);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                c.add_gate(li, Gate{GateFunc::Copy, {wire(lo, j * out_size + i)}, {}, 0});
            for (std::size_t k = n; k < out_size; ++k)
                c.add_gate(li, Gate{GateFunc::Copy, {wire(lo, i * out_size + k)}, {}, 0});
        }
        prev_size = out_size;
    }

    const std::size_t lf = c.add_layer();
    parts.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < M; ++k) {
            const auto id = c.register_opaque(
                [algo, n, i, k, M, alphabet_bits](std::span<const Value> in) -> Value {
                    const auto out = algo->output_fn(i, canonical_state(in, n));
                    if (out.size() != M) throw std::length_error("output_fn returned wrong size");
                    if (out[k] >> alphabet_bits) throw std::length_error("output exceeds alphabet");
                    return out[k];
                });
            Gate g{GateFunc::Opaque, {}, {}, id};
            for (std::size_t s = 0; s < prev_size; ++s) g.in.push_back(wire(lf - 1, i * prev_size + s));
            parts[lf][i].push_back(static_cast<std::uint32_t>(c.add_gate(lf, std::move(g))));
        }

    auto scheme = PartitionScheme::from_parts(c, std::move(parts), n);
    return {std::move(c), std::move(scheme)};
}

std::vector<std::vector<Value>> run_clique_directly(const CliqueAlgorithm& alg,
                                                    const std::vector<std::vector<Value>>& inputs,
                                                    unsigned alphabet_bits) {
    const std::size_t n = inputs.size();
    std::vector<std::vector<Value>> state(inputs);
    for (const auto& s : state)
        if (s.size() != n) throw std::invalid_argument("each node needs exactly n inputs");
    for (std::size_t r = 1; r <= alg.rounds; ++r) {
        std::vector<std::vector<Value>> sent(n);
        for (std::size_t i = 0; i < n; ++i) {
            sent[i] = alg.message_fn(i, r, state[i]);
            check_messages(sent[i], n, alphabet_bits);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) state[i].push_back(sent[j][i]);
    }
    std::vector<std::vector<Value>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = alg.output_fn(i, state[i]);
        if (out[i].size() != alg.output_size) throw std::length_error("output_fn returned wrong size");
    }
    return out;
}

std::vector<Value> flatten(const std::vector<std::vector<Value>>& per_node) {
    std::vector<Value> out;
    for (const auto& v : per_node) out.insert(out.end(), v.begin(), v.end());
    return out;
}

namespace {

Value mask_of(unsigned bits) { return (Value{1} << bits) - 1; }

Value sum_mod(std::span<const Value> v, unsigned bits) {
    Value s = 0;
    for (Value x : v) s += x;
    return s & mask_of(bits);
}

}  // namespace

CliqueAlgorithm echo_algorithm(std::size_t n) {
    CliqueAlgorithm a;
    a.name = "echo";
    a.rounds = 1;
    a.output_size = n;
    a.message_fn = [](std::size_t, std::size_t, std::span<const Value> state) {
        return std::vector<Value>(state.begin(), state.end());
    };
    a.output_fn = [](std::size_t, std::span<const Value> state) {
        const std::size_t n = state.size() / 2;
        return std::vector<Value>(state.begin() + n, state.end());
    };
    return a;
}

CliqueAlgorithm sum_broadcast_algorithm(unsigned bits) {
    CliqueAlgorithm a;
    a.name = "sum-broadcast";
    a.rounds = 2;
    a.output_size = 1;
    a.message_fn = [bits](std::size_t, std::size_t round, std::span<const Value> state) {
        const std::size_t n = state.size() / (round);
        std::vector<Value> out(n, 0);
        if (round == 1) {
            out[0] = sum_mod(state.subspan(0, n), bits);
        } else {
            // only node 0 has received anything meaningful
            const Value total = sum_mod(state.subspan(n, n), bits);
            for (auto& m : out) m = total;
        }
        return out;
    };
    a.output_fn = [](std::size_t, std::span<const Value> state) {
        const std::size_t n = state.size() / 3;
        return std::vector<Value>{state[2 * n]};  // round-2 message from node 0
    };
    return a;
}

CliqueAlgorithm prefix_sum_algorithm(unsigned bits) {
    CliqueAlgorithm a;
    a.name = "prefix-sum";
    a.rounds = 3;
    a.output_size = 1;
    // running value after `done` rounds of doubling
    auto running = [bits](std::size_t node, std::size_t done, std::span<const Value> state,
                          std::size_t n) {
        Value s = sum_mod(state.subspan(0, n), bits);
        for (std::size_t r = 1; r <= done; ++r) {
            const std::size_t step = std::size_t{1} << (r - 1);
            if (node >= step) s = (s + state[r * n + node - step]) & mask_of(bits);
        }
        return s;
    };
    a.message_fn = [running](std::size_t node, std::size_t round, std::span<const Value> state) {
        const std::size_t n = state.size() / round;
        std::vector<Value> out(n, 0);
        const std::size_t step = std::size_t{1} << (round - 1);
        if (node + step < n) out[node + step] = running(node, round - 1, state, n);
        return out;
    };
    a.output_fn = [running](std::size_t node, std::span<const Value> state) {
        const std::size_t n = state.size() / 4;
        return std::vector<Value>{running(node, 3, state, n)};
    };
    return a;
}

CliqueAlgorithm sample_algorithm(const std::string& name, std::size_t n, unsigned alphabet_bits) {
    if (name == "echo") return echo_algorithm(n);
    if (name == "sum-broadcast") return sum_broadcast_algorithm(alphabet_bits);
    if (name == "prefix-sum") {
        if (n > 8) throw std::invalid_argument("prefix-sum supports n <= 8");
        return prefix_sum_algorithm(alphabet_bits);
    }
    throw std::invalid_argument("unknown Clique algorithm '" + name +
                                "' (expected echo, sum-broadcast or prefix-sum)");
}

}  // namespace ftclique
