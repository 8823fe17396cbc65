/**************************************************************************
 * protocol.hpp
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
#include "ftclique/engine.hpp"

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace ftclique {

/// What the network starts with: a circuit, its partition, the layer-0
/// values and which node initially holds each of them.
struct ProtocolInput {
    const LayeredCircuit* circuit = nullptr;
    const PartitionScheme* scheme = nullptr;
    std::vector<Value> inputs;
    std::vector<std::uint32_t> initial_owner;  // per layer-0 gate
};

/// Parts still lacking a complete checkpoint of the current epoch's end layer.
class BingoCard {
public:
    explicit BingoCard(std::size_t parts = 0) : parts_(parts) {}
    void mark_missing(std::uint32_t part) { missing_.insert(part); }
    void mark_done(std::uint32_t part) { missing_.erase(part); }
    bool done() const { return missing_.empty(); }
    bool is_missing(std::uint32_t part) const { return missing_.count(part) != 0; }
    std::vector<std::uint32_t> missing() const { return {missing_.begin(), missing_.end()}; }
    std::size_t parts() const { return parts_; }

private:
    std::size_t parts_;
    std::set<std::uint32_t> missing_;
};

/// Assignment of missing parts to simulators for one attempt.
struct AttemptPlan {
    bool case_a = false;       // more missing parts than alive nodes
    std::size_t failed = 0;    // F
    std::size_t missing = 0;   // F^c
    std::size_t batch_count = 0;
    std::size_t multiplicity = 0;  // simulators per batch
    std::size_t leftover = 0;      // alive nodes without a batch
    std::vector<std::vector<std::uint32_t>> batches;  // parts
    std::vector<std::vector<std::uint32_t>> groups;   // simulators of batches[j]
    std::vector<std::uint32_t> deferred;              // parts left for a later attempt
};

/// `alive` and `missing` must be sorted. With F^c > n - F every alive node
/// takes one part and the rest wait; otherwise the parts are cut into
/// max(floor(F^c / divisor), 1) runs of `divisor` (the last one absorbs the
/// remainder) and each run gets floor((n - F) / batches) simulators.
/// `batch_divisor` defaults to 3c.
AttemptPlan plan_attempt(std::span<const std::uint32_t> alive, std::span<const std::uint32_t> missing,
                         std::size_t n, std::size_t c, std::size_t batch_divisor = 0);

/// Batches an adversary can wipe out with `new_failures` failures when it
/// kills whole simulator groups.
std::size_t worst_case_failed_batches(const AttemptPlan& plan, std::size_t new_failures);

struct ProtocolOptions {
    /// Collect the codewords a batch needs once, up front, instead of per part.
    bool pipeline_collect = false;
    bool decode_phase = true;
};

struct EpochReport {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t attempts = 0;
    std::size_t main_rounds = 0;
    std::size_t attempt_rounds = 0;
    std::size_t missing_after_main = 0;
};

/// One collector of the decode phase.
struct DecodeOutcome {
    std::uint32_t collector = 0;
    std::uint32_t target = 0;
    bool alive = false;
    std::vector<Value> values;  // P_{D,target} in part order, when alive
};

struct ProtocolResult {
    /// V_D assembled from the surviving output checkpoints.
    std::vector<Value> outputs;
    bool outputs_recovered = false;
    std::vector<DecodeOutcome> decodes;
    std::vector<EpochReport> epochs;
    std::size_t attempts_total = 0;
    std::size_t max_attempts_per_epoch = 0;
    /// Fewest alive members seen in any codeword group after any round.
    std::size_t min_group_alive = 0;
    /// Fewest parts completed by a case-(a) attempt (n when none ran).
    std::size_t min_case_a_progress = 0;
    std::size_t input_width = 0;  // interleave width of the input checkpoint
};

/// Crash-tolerant execution: quiet shuffle and input checkpoint, then one
/// epoch per checkpointed layer with bingo-card attempts, then the decode
/// phase. Codewords have the scheme's group size; piece j of part v is held
/// by group (v + j) mod (n / group size).
ProtocolResult run_faulty(const ProtocolInput& input, Engine& engine, const ProtocolOptions& options = {});

/// Same protocol under the sublinear fault model; chi = 1 is the
/// single-group case and behaves exactly like run_faulty.
ProtocolResult run_faulty_sublinear(const ProtocolInput& input, Engine& engine,
                                    const ProtocolOptions& options = {});

struct NonfaultyResult {
    std::vector<Value> outputs;
    /// (layer, rounds spent routing into it) per communication layer.
    std::vector<std::pair<std::size_t, std::size_t>> layer_rounds;
};

/// Failure-free execution: route the cross wires of each communication layer
/// in invocations of at most n demands per node, compute locally otherwise.
NonfaultyResult run_nonfaulty(const ProtocolInput& input, Engine& engine);

}  // namespace ftclique
