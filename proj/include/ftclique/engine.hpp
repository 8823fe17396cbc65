/**************************************************************************
 * engine.hpp
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

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftclique {

struct SimConfig {
    std::size_t n = 8;
    std::size_t c = 2;
    double chi = 1.0;            // 1 = linear fault model
    unsigned b = 1;              // bandwidth constant: messages carry b * ceil(log2 n) bits
    std::size_t route_cost = 2;  // rounds per routing invocation
    std::uint64_t seed = 0;
    bool keep_delivery_log = false;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    unsigned message_bits() const;
    /// n^chi (n when chi = 1).
    std::size_t fault_group() const;
    /// floor((c - 1) / c * n^chi).
    std::size_t budget() const;
};

/// Adversary or model rule broken (quiet-round failure, over-budget failure).
class ModelViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A protocol exceeded a per-round bandwidth cap; always a bug.
class CapViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class RoundKind : std::uint8_t { Quiet, Protocol, Decode };
const char* to_string(RoundKind k);

struct Message {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t tag = 0;
    std::uint16_t bits = 0;  // declared size
    std::uint64_t word = 0;
};

/// Nodes working for one part in the current sub-phase (owner or simulators).
struct SimulatorGroup {
    std::uint32_t part = 0;
    std::vector<std::uint32_t> nodes;
};

/// What an adversary may observe before a round: public protocol state only.
struct PublicView {
    std::size_t round = 0;       // 1-based round about to run
    RoundKind kind = RoundKind::Protocol;
    const std::string* phase = nullptr;
    std::size_t phase_round = 0;  // rounds already run in this phase
    const std::vector<bool>* alive = nullptr;
    std::size_t failed = 0;
    std::size_t budget = 0;
    /// Parts being checkpointed in this phase and who is sending them.
    const std::vector<SimulatorGroup>* groups = nullptr;
};

class Adversary {
public:
    virtual ~Adversary() = default;
    /// Nodes to fail at the start of the round.
    virtual std::vector<std::uint32_t> observe(const PublicView& view) = 0;
    virtual std::string name() const = 0;
};

std::unique_ptr<Adversary> make_no_adversary();
/// Each alive node fails independently with probability `rate` per
/// non-quiet round until the budget is spent.
std::unique_ptr<Adversary> make_random_adversary(double rate, std::uint64_t seed);
/// At the first round of every checkpoint phase, fails all simulators of the
/// part with the fewest alive simulators if the budget allows.
std::unique_ptr<Adversary> make_greedy_adversary();
/// At the first round of every checkpoint phase, fails the senders (lowest
/// ids first) until the budget is spent.
std::unique_ptr<Adversary> make_owner_killer_adversary();

/// Script entries: `round <r> fail <ids>` or `phase <prefix> [after <k>] fail <ids>`.
struct ScriptEntry {
    bool by_phase = false;
    std::size_t round = 0;
    std::string prefix;
    std::size_t after = 0;
    std::vector<std::uint32_t> ids;
};
std::vector<ScriptEntry> parse_script(std::istream& in);
std::vector<ScriptEntry> load_script(const std::string& path);
std::unique_ptr<Adversary> make_scripted_adversary(std::vector<ScriptEntry> entries, std::string label);

/// none | random:<rate> | greedy | worst:<1..3> | script:<path>
std::unique_ptr<Adversary> make_adversary(const std::string& spec, const SimConfig& config);
/// Hand-crafted schedules: 1 = owner killer, 2 = whole budget at the first
/// checkpoint, 3 = budget split over checkpoint, attempt and collection phases.
std::unique_ptr<Adversary> make_worst_case_adversary(int which, const SimConfig& config);

struct RoundRecord {
    std::size_t round = 0;
    RoundKind kind = RoundKind::Protocol;
    std::string phase;
    std::size_t alive = 0;
    std::size_t sent = 0;
    std::size_t delivered = 0;
    std::vector<std::uint32_t> failed;
};

struct Delivery {
    std::size_t round = 0;
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
};

struct RoundLedger {
    std::size_t quiet_rounds = 0;
    std::size_t protocol_rounds = 0;
    std::size_t decode_rounds = 0;
    std::size_t route_invocations = 0;
    std::vector<std::size_t> sent_per_node;
    std::vector<std::size_t> received_per_node;
    std::size_t max_sent_in_round = 0;      // by one node
    std::size_t max_received_in_round = 0;  // by one node
    std::vector<std::size_t> attempts_per_epoch;
    std::vector<std::pair<std::size_t, std::uint32_t>> failures;  // (round, node)
    std::vector<RoundRecord> rounds;
    std::vector<Delivery> deliveries;  // only with keep_delivery_log

    std::size_t total_rounds() const { return quiet_rounds + protocol_rounds + decode_rounds; }
};

/// Lockstep Faulty Clique network. Failures are applied at the start of each
/// round through the adversary; failed nodes neither send nor receive.
class Engine {
public:
    Engine(SimConfig config, std::unique_ptr<Adversary> adversary);

    const SimConfig& config() const { return config_; }
    std::size_t n() const { return config_.n; }
    std::size_t round() const { return round_; }

    bool alive(std::uint32_t u) const { return alive_[u]; }
    const std::vector<bool>& alive_mask() const { return alive_; }
    /// Sorted alive ids (perfect failure detection, free of charge).
    std::vector<std::uint32_t> membership() const;
    std::size_t alive_count() const { return alive_count_; }
    std::size_t failed_count() const { return n() - alive_count_; }
    std::size_t budget() const { return budget_; }

    void set_phase(std::string label, std::vector<SimulatorGroup> groups = {});
    const std::string& phase() const { return phase_; }

    /// One synchronous round. Throws CapViolation if the outbox breaks a cap
    /// (more than n messages per sender or receiver, two messages on one
    /// ordered pair, or a message wider than the bandwidth). Returns the
    /// messages whose sender and receiver are alive.
    std::vector<Message> step_round(const std::vector<Message>& outbox, RoundKind kind);

    /// Idealized routing: charges route_cost rounds and delivers every demand
    /// whose endpoints are alive afterwards. Each node may source and sink at
    /// most `load_limit` demands (n when 0).
    std::vector<Message> route(const std::vector<Message>& demands, RoundKind kind,
                               std::size_t load_limit = 0);

    RoundLedger& ledger() { return ledger_; }
    const RoundLedger& ledger() const { return ledger_; }

    void set_trace(std::ostream* trace) { trace_ = trace; }

private:
    void begin_round(RoundKind kind);
    void fail(const std::vector<std::uint32_t>& ids, RoundKind kind);
    void check_caps(const std::vector<Message>& outbox, std::size_t limit, bool per_pair) const;
    void finish_round(RoundKind kind, std::size_t sent, std::size_t delivered,
                      std::vector<std::uint32_t> failed);

    SimConfig config_;
    std::unique_ptr<Adversary> adversary_;
    std::size_t budget_;
    std::size_t round_ = 0;
    std::vector<bool> alive_;
    std::size_t alive_count_;
    std::string phase_;
    std::size_t phase_round_ = 0;
    std::vector<SimulatorGroup> groups_;
    std::vector<std::uint32_t> failed_now_;
    RoundLedger ledger_;
    std::ostream* trace_ = nullptr;
};

}  // namespace ftclique
