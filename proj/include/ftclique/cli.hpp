/**************************************************************************
 * cli.hpp
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
#include "ftclique/protocol.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ftclique {

/// A circuit with its partition, concrete inputs and the outputs an
/// independent oracle (naive product, direct Clique execution) predicts.
struct Workload {
    std::string name;
    LayeredCircuit circuit{2, 1, Semiring{}};
    PartitionScheme scheme;
    std::vector<Value> inputs;
    std::vector<std::uint32_t> initial_owner;
    std::vector<Value> expected;  // V_D in gate order
};

/// semiring-mm:plus-times | semiring-mm:tropical | fast-mm:trivial |
/// fast-mm:strassen | clique:echo | clique:sum-broadcast | clique:prefix-sum.
/// Symbols have b * ceil(log2 n) bits. Throws std::invalid_argument with an
/// actionable message for unsupported (name, n, chi).
Workload make_workload(const std::string& name, std::size_t n, double chi, unsigned b, std::uint64_t seed);

std::vector<std::string> workload_names();

struct RunConfig {
    std::string workload = "semiring-mm:plus-times";
    std::size_t n = 8;
    std::size_t c = 2;
    double chi = 1.0;
    std::string adversary = "none";
    std::uint64_t seed = 1;
    std::size_t route_cost = 2;
    unsigned b = 1;
    bool pipeline_collect = false;
    bool nonfaulty = false;  // failure-free runner instead of the tolerant one
    std::string trace;       // per-round trace file, empty for none

    SimConfig sim_config() const;
};

struct RunRecord {
    std::size_t n = 0;
    std::size_t c = 0;
    double chi = 1.0;
    std::string workload;
    std::string adversary;
    std::uint64_t seed = 0;
    std::size_t quiet_rounds = 0;
    std::size_t protocol_rounds = 0;
    std::size_t decode_rounds = 0;
    std::size_t attempts_total = 0;
    std::size_t max_attempts_per_epoch = 0;
    bool correct = false;
    double wall_ms = 0;
    // Not part of the CSV.
    std::size_t failures = 0;
    std::size_t min_group_alive = 0;
    std::size_t group_threshold = 0;  // K of the codeword groups
    std::size_t min_case_a_progress = 0;
    std::size_t input_width = 0;
    std::size_t max_sent_in_round = 0;
    std::size_t max_received_in_round = 0;
};

/// One simulation. Throws std::invalid_argument for bad configurations and
/// ModelViolation when the adversary breaks the fault model.
RunRecord run_once(const RunConfig& config);
/// Same with a caller-supplied adversary (its name goes in the record).
RunRecord run_once(const RunConfig& config, std::unique_ptr<Adversary> adversary);

std::string csv_header(bool with_ratio = false);
std::string csv_row(const RunRecord& r, bool with_ratio = false);
/// protocol_rounds / (c^2 * n^{1/3} * log2 n).
double round_ratio(const RunRecord& r);

struct SweepConfig {
    RunConfig base;
    std::vector<std::size_t> ns{8, 27, 64};
    std::vector<std::size_t> cs{2, 3, 4};
    std::vector<double> chis{1.0};
    std::vector<std::string> adversaries{"random:0.05"};
    std::size_t seeds = 10;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Cartesian grid in a fixed order. Runs that throw (including combinations
/// that break a divisibility rule) are emitted as flagged rows with zero
/// round counts and correct=0. Rows are written in grid order regardless of
/// thread scheduling. Returns the number of rows.
std::size_t cmd_sweep(const SweepConfig& config, std::ostream& csv);

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
};

/// The acceptance suites; `log` receives progress lines when non-null.
std::vector<CriterionResult> run_acceptance(std::ostream* log = nullptr);

/// Batch-shrink property over n <= max_n, c in {2, 3}: with F^c >= 3c
/// missing parts and F' < F_remain / 2 new failures, an adversary killing
/// whole simulator groups wipes out at most ceil(batches / 4) batches.
/// `mutant` swaps in a planner that hands each batch floor((n - F) / F^c)
/// simulators. Returns (violations, tuples checked).
std::pair<std::size_t, std::size_t> batch_shrink_check(std::size_t max_n, bool mutant = false);

/// Reads sweep CSV and writes rounds_vs_n.svg and attempts_hist.svg into
/// `out_dir`. Returns the written paths. Throws on an empty or malformed CSV.
std::vector<std::string> cmd_plot(std::istream& csv, const std::string& out_dir);

}  // namespace ftclique
