/**************************************************************************
 * compile.hpp
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

#pragma once

#include "ftclique/circuit.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ftclique {

/// Deterministic T-round Clique algorithm. A node's accumulated state is its
/// n inputs followed by the n messages received in each completed round,
/// indexed by sender: state[n * r + j] is the message from j in round r.
struct CliqueAlgorithm {
    std::string name;
    std::size_t rounds = 0;
    std::size_t output_size = 1;
    /// Messages node `node` sends in round `round` (1-based); exactly n values.
    std::function<std::vector<Value>(std::size_t node, std::size_t round,
                                     std::span<const Value> state)>
        message_fn;
    std::function<std::vector<Value>(std::size_t node, std::span<const Value> state)> output_fn;
};

struct CompiledCircuit {
    LayeredCircuit circuit;
    PartitionScheme scheme;
};

/// b * ceil(log2 n) for n >= 2.
unsigned alphabet_bits_for(std::size_t n, unsigned b);

/// Depth 2T+1 circuit whose part P_{l,i} simulates node i. Layer 0 holds the
/// n inputs of each node; odd layers hold n outbox gates followed by storage
/// copies of the whole previous part; even layers hold n inbox gates (gate j
/// of part i reads outbox gate i of part j) followed by storage copies of
/// positions [n, (l'+1)n) of the previous part. The last layer holds
/// output_size gates per part. Pieces have n slots.
CompiledCircuit compile_clique(const CliqueAlgorithm& alg, std::size_t n, unsigned alphabet_bits);

/// Synchronous execution; inputs[i] are node i's n inputs. Throws
/// std::length_error when a message does not fit in `alphabet_bits` bits or a
/// node emits the wrong number of messages.
std::vector<std::vector<Value>> run_clique_directly(const CliqueAlgorithm& alg,
                                                    const std::vector<std::vector<Value>>& inputs,
                                                    unsigned alphabet_bits);

/// Node-major concatenation, the layer-0 order of compile_clique.
std::vector<Value> flatten(const std::vector<std::vector<Value>>& per_node);

// Sample algorithms; arithmetic is modulo 2^alphabet_bits.
// Node i sends input j to node j and outputs the n values it received.
CliqueAlgorithm echo_algorithm(std::size_t n);
// Every node sends its input sum to node 0, which broadcasts the total.
CliqueAlgorithm sum_broadcast_algorithm(unsigned alphabet_bits);
// Inclusive prefix sums of the per-node input sums by doubling; n <= 8.
CliqueAlgorithm prefix_sum_algorithm(unsigned alphabet_bits);
/// "echo", "sum-broadcast" or "prefix-sum"; throws std::invalid_argument.
CliqueAlgorithm sample_algorithm(const std::string& name, std::size_t n, unsigned alphabet_bits);

}  // namespace ftclique
