/**************************************************************************
 * protocol.cpp
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

#include "ftclique/protocol.hpp"

#include "ftclique/galois.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace ftclique {

AttemptPlan plan_attempt(std::span<const std::uint32_t> alive, std::span<const std::uint32_t> missing,
                         std::size_t n, std::size_t c, std::size_t batch_divisor) {
    AttemptPlan p;
    const std::size_t live = alive.size();
    p.failed = n - live;
    p.missing = missing.size();
    if (missing.empty() || live == 0) return p;
    const std::size_t divisor = batch_divisor ? batch_divisor : 3 * c;
    if (p.missing > live) {
        p.case_a = true;
        p.batch_count = live;
        p.multiplicity = 1;
        for (std::size_t i = 0; i < live; ++i) {
            p.batches.push_back({missing[i]});
            p.groups.push_back({alive[i]});
        }
        p.deferred.assign(missing.begin() + static_cast<std::ptrdiff_t>(live), missing.end());
        return p;
    }
    p.batch_count = std::max<std::size_t>(p.missing / divisor, 1);
    p.multiplicity = live / p.batch_count;
    p.leftover = live % p.batch_count;
    for (std::size_t j = 0; j < p.batch_count; ++j) {
        std::size_t lo = j * divisor, hi = j + 1 == p.batch_count ? p.missing : (j + 1) * divisor;
        p.batches.emplace_back(missing.begin() + static_cast<std::ptrdiff_t>(lo),
                               missing.begin() + static_cast<std::ptrdiff_t>(hi));
        p.groups.emplace_back(alive.begin() + static_cast<std::ptrdiff_t>(j * p.multiplicity),
                              alive.begin() + static_cast<std::ptrdiff_t>((j + 1) * p.multiplicity));
    }
    return p;
}

std::size_t worst_case_failed_batches(const AttemptPlan& plan, std::size_t new_failures) {
    if (plan.multiplicity == 0) return plan.batch_count;
    return std::min(plan.batch_count, new_failures / plan.multiplicity);
}

namespace {

struct CwKey {
    std::uint32_t layer = 0;
    std::uint32_t part = 0;
    std::uint32_t index = 0;
};

std::uint64_t pack(const CwKey& k) {
    return std::uint64_t{k.layer} << 42 | std::uint64_t{k.part} << 21 | k.index;
}


void check_input(const ProtocolInput& in) {
    if (!in.circuit || !in.scheme) throw std::invalid_argument("protocol input lacks a circuit or scheme");
    const auto& C = *in.circuit;
    if (C.num_layers() == 0) throw std::invalid_argument("empty circuit");
    if (in.inputs.size() != C.layer(0).size())
        throw std::invalid_argument("expected " + std::to_string(C.layer(0).size()) + " input values");
    if (in.initial_owner.size() != in.inputs.size())
        throw std::invalid_argument("initial_owner must name one node per input");
    for (auto o : in.initial_owner)
        if (o >= C.n()) throw std::invalid_argument("initial owner out of range");
    if (in.scheme->num_parts() != C.n()) throw std::invalid_argument("scheme must have n parts");
}

class Network {
public:
    Network(const ProtocolInput& in, Engine& engine)
        : C_(*in.circuit), S_(*in.scheme), E_(engine), n_(C_.n()), bits_(C_.alphabet_bits()) {
        check_input(in);
        if (engine.n() != n_) throw std::invalid_argument("engine and circuit disagree on n");
        if (bits_ > engine.config().message_bits())
            throw std::invalid_argument("alphabet of " + std::to_string(bits_) +
                                        " bits does not fit a message of " +
                                        std::to_string(engine.config().message_bits()) + " bits");
        known_.resize(n_);
        have_.resize(n_);
        own_.resize(n_);
        scratch_.resize(C_.num_layers());
        pos_.resize(C_.num_layers());
        for (std::size_t l = 0; l < C_.num_layers(); ++l) {
            pos_[l].assign(C_.layer(l).size(), 0);
            for (std::size_t w = 0; w < n_; ++w) {
                const auto& gates = S_.part(l, w);
                for (std::size_t i = 0; i < gates.size(); ++i) pos_[l][gates[i]] = static_cast<std::uint32_t>(i);
            }
        }
    }

protected:
    // Input shuffle: every layer-0 value travels from its initial holder to
    // the owner of its part in one routing invocation. The tolerant protocol
    // charges the invocation even when nothing moves.
    void shuffle(const ProtocolInput& in, bool always) {
        E_.set_phase("quiet:shuffle");
        for (std::uint32_t u = 0; u < n_; ++u) own_[u].assign(S_.part(0, u).size(), 0);
        std::vector<Message> demands;
        std::vector<std::size_t> load_out(n_, 0), load_in(n_, 0);
        for (std::size_t gate = 0; gate < in.inputs.size(); ++gate) {
            std::uint32_t from = in.initial_owner[gate], to = S_.part_of(0, gate);
            if (from == to) {
                own_[to][pos_[0][gate]] = in.inputs[gate];
                continue;
            }
            demands.push_back({from, to, static_cast<std::uint32_t>(gate), static_cast<std::uint16_t>(bits_),
                               in.inputs[gate]});
            ++load_out[from];
            ++load_in[to];
        }
        if (demands.empty() && !always) return;
        std::size_t load = std::max({n_, *std::max_element(load_out.begin(), load_out.end()),
                                     *std::max_element(load_in.begin(), load_in.end())});
        auto delivered = E_.route(demands, RoundKind::Quiet, load);
        if (delivered.size() != demands.size()) throw std::logic_error("input shuffle lost a value");
        for (const auto& m : delivered) own_[m.dst][pos_[0][m.tag]] = m.word;
    }

    void reset_known(std::size_t layer) {
        const std::size_t size = C_.layer(layer).size();
        for (std::size_t u = 0; u < n_; ++u) {
            known_[u].assign(size, 0);
            have_[u].assign(size, 0);
        }
    }

    void learn_own(std::uint32_t u, std::size_t layer) {
        const auto& gates = S_.part(layer, u);
        for (std::size_t i = 0; i < gates.size(); ++i) {
            known_[u][gates[i]] = own_[u][i];
            have_[u][gates[i]] = 1;
        }
    }

    // Values of P_{t,v} computed by node x from what it knows of layer s.
    std::vector<Value> simulate(std::uint32_t x, std::uint32_t v, std::size_t s, std::size_t t) {
        for (auto gate : S_.part(s + 1, v))
            for (const auto& w : C_.layer(s + 1)[gate].in)
                if (!have_[x][w.index])
                    throw std::logic_error("node " + std::to_string(x) + " lacks input " +
                                           std::to_string(s) + ":" + std::to_string(w.index) +
                                           " of part " + std::to_string(v));
        std::span<const Value> prev = known_[x];
        for (std::size_t l = s + 1; l <= t; ++l) {
            auto& cur = scratch_[l];
            cur.resize(C_.layer(l).size());
            for (auto gate : S_.part(l, v)) cur[gate] = evaluate_gate(C_, l, gate, prev);
            prev = cur;
        }
        std::vector<Value> out;
        out.reserve(S_.part(t, v).size());
        for (auto gate : S_.part(t, v)) out.push_back(scratch_[t][gate]);
        return out;
    }

    const LayeredCircuit& C_;
    const PartitionScheme& S_;
    Engine& E_;
    std::size_t n_;
    unsigned bits_;
    std::vector<std::vector<Value>> known_;       // per node, current layer
    std::vector<std::vector<std::uint8_t>> have_;
    std::vector<std::vector<Value>> own_;         // per node, own part values
    std::vector<std::vector<Value>> scratch_;
    std::vector<std::vector<std::uint32_t>> pos_;  // gate -> position in its part
};

class FaultyRunner : Network {
public:
    FaultyRunner(const ProtocolInput& in, Engine& engine, const ProtocolOptions& opt)
        : Network(in, engine), in_(in), opt_(opt), g_(S_.group_size()) {
        const std::size_t c = engine.config().c;
        if (g_ == 0 || n_ % g_ != 0) throw std::invalid_argument("piece size must divide n");
        if (g_ % c != 0) throw std::invalid_argument("c must divide the piece size");
        if (engine.budget() * c > (c - 1) * g_)
            throw std::invalid_argument("failure budget could erase a codeword group");
        groups_ = n_ / g_;
        params_ = CodeParams::make(g_, c);
        c_ = c;
        store_.resize(n_);
        decoded_.resize(n_);
        plan_ = classify_layers(C_, S_);
        result_.min_group_alive = g_;
        result_.min_case_a_progress = n_;
    }

    ProtocolResult run() {
        shuffle(in_, true);
        checkpoint_inputs();
        for (std::size_t e = 0; e < plan_.epochs.size(); ++e) run_epoch(e);
        if (opt_.decode_phase) decode_phase();
        verify_outputs();
        return std::move(result_);
    }

private:
    struct Send {
        std::uint32_t node;
        std::uint32_t part;
        std::size_t layer;
        const std::vector<Value>* values;
    };

    std::uint32_t group_of(const CwKey& k) const {
        return k.layer == 0 ? k.index : static_cast<std::uint32_t>((k.part + k.index) % groups_);
    }

    CwKey codeword_of(std::uint32_t layer, std::uint32_t part, std::uint32_t piece) const {
        if (layer == 0) return {0, part, static_cast<std::uint32_t>((part + piece) % groups_)};
        return {layer, part, piece};
    }

    // Layer-0 codewords bundle every input piece bound for the same group.
    std::vector<std::uint32_t> pieces_in(const CwKey& k) const {
        if (k.layer != 0) return {k.index};
        std::vector<std::uint32_t> out;
        const auto count = S_.pieces(0, k.part).size();
        for (std::uint32_t j = 0; j < count; ++j)
            if ((k.part + j) % groups_ == k.index) out.push_back(j);
        return out;
    }

    std::vector<CwKey> codewords_of_part(std::size_t layer, std::uint32_t part) const {
        std::vector<CwKey> out;
        std::set<std::uint64_t> seen;
        const auto count = S_.pieces(layer, part).size();
        for (std::uint32_t j = 0; j < count; ++j) {
            auto k = codeword_of(static_cast<std::uint32_t>(layer), part, j);
            if (seen.insert(pack(k)).second) out.push_back(k);
        }
        return out;
    }

    std::vector<Value> state_of(const CwKey& k, const std::vector<Value>& part_values) const {
        std::vector<Value> state;
        for (auto j : pieces_in(k))
            for (auto gate : S_.pieces(k.layer, k.part)[j])
                state.push_back(gate == kVirtualGate ? 0 : part_values[pos_[k.layer][gate]]);
        return state;
    }

    void absorb(std::uint32_t x, const CwKey& k, const std::vector<Value>& state) {
        std::size_t at = 0;
        for (auto j : pieces_in(k))
            for (auto gate : S_.pieces(k.layer, k.part)[j]) {
                if (at >= state.size()) throw std::logic_error("decoded codeword too short");
                Value v = state[at++];
                if (gate == kVirtualGate) continue;
                known_[x][gate] = v;
                have_[x][gate] = 1;
            }
    }

    void check_groups() {
        const auto& alive = E_.alive_mask();
        for (std::size_t gr = 0; gr < groups_; ++gr) {
            std::size_t live = 0;
            for (std::size_t i = 0; i < g_; ++i) live += alive[gr * g_ + i] ? 1 : 0;
            result_.min_group_alive = std::min(result_.min_group_alive, live);
            if (live < params_.message_length)
                throw std::logic_error("group " + std::to_string(gr) + " fell below K alive holders");
        }
    }

    std::size_t width_of(const CwKey& k) const {
        auto it = width_.find(pack(k));
        if (it == width_.end())
            throw std::logic_error("collecting an incomplete checkpoint (layer " + std::to_string(k.layer) +
                                   ", part " + std::to_string(k.part) + ")");
        return it->second;
    }

    // Every alive holder of a requested codeword sends its shard to the
    // collector, one codeword per collector and group per c-round window.
    void collect(const std::string& label, RoundKind kind,
                 const std::vector<std::vector<CwKey>>& requests) {
        E_.set_phase(label);
        std::vector<std::vector<std::vector<CwKey>>> queues(n_, std::vector<std::vector<CwKey>>(groups_));
        std::size_t windows = 0;
        for (std::uint32_t x = 0; x < n_; ++x) {
            if (!E_.alive(x)) continue;
            for (const auto& k : requests[x]) {
                if (!decoded_[x].insert(pack(k)).second) continue;
                auto& q = queues[x][group_of(k)];
                q.push_back(k);
                windows = std::max(windows, q.size());
            }
        }
        struct Job {
            std::uint32_t x;
            CwKey key;
            std::size_t width;
        };
        for (std::size_t w = 0; w < windows; ++w) {
            std::vector<Job> jobs;
            std::size_t wmax = 0;
            for (std::uint32_t x = 0; x < n_; ++x)
                for (std::size_t gr = 0; gr < groups_; ++gr)
                    if (w < queues[x][gr].size()) {
                        const auto& k = queues[x][gr][w];
                        jobs.push_back({x, k, width_of(k)});
                        wmax = std::max(wmax, jobs.back().width);
                    }
            // received[j][i]: payload from group member i; count of elements
            std::vector<std::vector<std::vector<Fp>>> received(jobs.size());
            std::vector<std::vector<std::size_t>> counts(jobs.size(), std::vector<std::size_t>(g_, 0));
            for (std::size_t j = 0; j < jobs.size(); ++j)
                received[j].assign(g_, std::vector<Fp>(jobs[j].width));
            for (std::size_t r = 0; r < c_ * wmax; ++r) {
                const std::size_t element = r / c_;
                const bool tail = r % c_ == c_ - 1;
                std::vector<Message> out;
                for (std::size_t j = 0; j < jobs.size(); ++j) {
                    const auto& job = jobs[j];
                    if (element >= job.width || !E_.alive(job.x)) continue;
                    const std::uint32_t base = group_of(job.key) * static_cast<std::uint32_t>(g_);
                    const auto packed = pack(job.key);
                    for (std::uint32_t h = base; h < base + g_; ++h) {
                        if (h == job.x || !E_.alive(h)) continue;
                        auto it = store_[h].find(packed);
                        if (it == store_[h].end()) throw std::logic_error("alive holder lacks its shard");
                        out.push_back({h, job.x, static_cast<std::uint32_t>(j),
                                       static_cast<std::uint16_t>(E_.config().message_bits()),
                                       tail ? it->second[element].value() : 0});
                    }
                }
                auto delivered = E_.step_round(out, kind);
                check_groups();
                if (!tail) continue;
                for (const auto& m : delivered) {
                    const auto& job = jobs[m.tag];
                    const std::size_t i = m.src - group_of(job.key) * g_;
                    received[m.tag][i][element] = Fp{m.word};
                    ++counts[m.tag][i];
                }
            }
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                const auto& job = jobs[j];
                if (!E_.alive(job.x)) continue;
                const std::uint32_t base = group_of(job.key) * static_cast<std::uint32_t>(g_);
                std::vector<Shard> shards;
                for (std::uint32_t i = 0; i < g_; ++i) {
                    if (base + i == job.x) {
                        auto it = store_[job.x].find(pack(job.key));
                        if (it != store_[job.x].end()) shards.push_back({i, it->second});
                    } else if (counts[j][i] == job.width) {
                        shards.push_back({i, std::move(received[j][i])});
                    }
                }
                if (shards.size() < params_.message_length)
                    throw std::logic_error("collector " + std::to_string(job.x) + " received only " +
                                           std::to_string(shards.size()) + " shards");
                absorb(job.x, job.key, decode_state(shards, params_, bits_));
            }
        }
    }

    // Senders encode each codeword of their part and push shard i to the
    // i-th member of the codeword's group, c rounds per field element.
    void checkpoint(const std::string& label, RoundKind kind, const std::vector<Send>& sends) {
        std::map<std::uint32_t, std::vector<std::uint32_t>> by_part;
        for (const auto& s : sends) by_part[s.part].push_back(s.node);
        std::vector<SimulatorGroup> view;
        for (auto& [part, nodes] : by_part) view.push_back({part, nodes});
        E_.set_phase(label, std::move(view));

        struct Job {
            std::uint32_t x;
            CwKey key;
            std::shared_ptr<const std::vector<Shard>> shards;
        };
        std::vector<std::vector<std::vector<Job>>> queues(n_, std::vector<std::vector<Job>>(groups_));
        std::size_t windows = 0;
        for (const auto& s : sends) {
            for (const auto& k : codewords_of_part(s.layer, s.part)) {
                auto shards = std::make_shared<const std::vector<Shard>>(
                    encode_state(state_of(k, *s.values), params_, bits_));
                auto& q = queues[s.node][group_of(k)];
                q.push_back({s.node, k, std::move(shards)});
                windows = std::max(windows, q.size());
            }
        }
        for (std::size_t w = 0; w < windows; ++w) {
            std::vector<const Job*> jobs;
            std::size_t wmax = 0;
            for (std::uint32_t x = 0; x < n_; ++x)
                for (std::size_t gr = 0; gr < groups_; ++gr)
                    if (w < queues[x][gr].size()) {
                        jobs.push_back(&queues[x][gr][w]);
                        wmax = std::max(wmax, jobs.back()->shards->front().payload.size());
                    }
            std::vector<std::vector<std::vector<Fp>>> received(jobs.size());
            std::vector<std::vector<std::size_t>> counts(jobs.size(), std::vector<std::size_t>(g_, 0));
            for (std::size_t j = 0; j < jobs.size(); ++j)
                received[j].assign(g_, std::vector<Fp>(jobs[j]->shards->front().payload.size()));
            for (std::size_t r = 0; r < c_ * wmax; ++r) {
                const std::size_t element = r / c_;
                const bool tail = r % c_ == c_ - 1;
                std::vector<Message> out;
                for (std::size_t j = 0; j < jobs.size(); ++j) {
                    const auto& job = *jobs[j];
                    const std::size_t width = job.shards->front().payload.size();
                    if (element >= width || !E_.alive(job.x)) continue;
                    const std::uint32_t base = group_of(job.key) * static_cast<std::uint32_t>(g_);
                    for (std::uint32_t i = 0; i < g_; ++i) {
                        if (base + i == job.x || !E_.alive(base + i)) continue;
                        out.push_back({job.x, base + i, static_cast<std::uint32_t>(j),
                                       static_cast<std::uint16_t>(E_.config().message_bits()),
                                       tail ? (*job.shards)[i].payload[element].value() : 0});
                    }
                }
                auto delivered = E_.step_round(out, kind);
                check_groups();
                if (!tail) continue;
                for (const auto& m : delivered) {
                    const std::size_t i = m.dst - group_of(jobs[m.tag]->key) * g_;
                    received[m.tag][i][element] = Fp{m.word};
                    ++counts[m.tag][i];
                }
            }
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                const auto& job = *jobs[j];
                if (!E_.alive(job.x)) continue;  // partial codewords are discarded
                const auto packed = pack(job.key);
                const std::size_t width = job.shards->front().payload.size();
                const std::uint32_t base = group_of(job.key) * static_cast<std::uint32_t>(g_);
                for (std::uint32_t i = 0; i < g_; ++i) {
                    const std::uint32_t h = base + i;
                    if (!E_.alive(h)) continue;
                    std::vector<Fp> payload;
                    if (h == job.x) {
                        payload = (*job.shards)[i].payload;
                    } else {
                        if (counts[j][i] != width) throw std::logic_error("alive holder missed a shard");
                        payload = std::move(received[j][i]);
                    }
                    auto [it, fresh] = store_[h].try_emplace(packed, std::move(payload));
                    if (!fresh && it->second != (*job.shards)[i].payload)
                        throw std::logic_error("simulators disagree on a checkpoint");
                }
                width_[packed] = width;
            }
        }
    }

    bool part_complete(std::size_t layer, std::uint32_t part) const {
        for (const auto& k : codewords_of_part(layer, part))
            if (!width_.count(pack(k))) return false;
        return true;
    }

    void checkpoint_inputs() {
        std::vector<Send> sends;
        for (std::uint32_t u = 0; u < n_; ++u) sends.push_back({u, u, 0, &own_[u]});
        for (std::uint32_t u = 0; u < n_; ++u)
            for (const auto& k : codewords_of_part(0, u))
                result_.input_width = std::max(
                    result_.input_width, interleave_width(state_of(k, own_[u]).size(), params_, bits_));
        checkpoint("quiet:checkpoint", RoundKind::Quiet, sends);
        for (std::uint32_t u = 0; u < n_; ++u)
            if (!part_complete(0, u)) throw std::logic_error("input checkpoint incomplete");
    }

    // Codewords x must fetch to compute part v from layer s.
    std::vector<CwKey> needs(std::uint32_t x, std::uint32_t v, std::size_t s) {
        auto& cache = needs_[v];
        if (!cache_valid_[v]) {
            cache.clear();
            std::set<std::uint64_t> seen;
            for (const auto& p : inputs_of_part(C_, S_, s, v)) {
                auto k = codeword_of(p.layer, p.part, p.piece);
                if (seen.insert(pack(k)).second) cache.push_back(k);
            }
            cache_valid_[v] = true;
        }
        std::vector<CwKey> out;
        for (const auto& k : cache)
            if (k.part != x) out.push_back(k);
        return out;
    }

    void run_epoch(std::size_t e) {
        const auto& ep = plan_.epochs[e];
        const std::size_t s = ep.start, t = ep.end;
        const std::string tag = "epoch:" + std::to_string(e);
        EpochReport report{s, t, 0, 0, 0, 0};
        const std::size_t rounds_before = E_.ledger().protocol_rounds;

        needs_.assign(n_, {});
        cache_valid_.assign(n_, false);
        reset_known(s);
        for (auto& d : decoded_) d.clear();
        for (std::uint32_t u = 0; u < n_; ++u)
            if (E_.alive(u)) learn_own(u, s);

        std::vector<std::vector<CwKey>> requests(n_);
        for (std::uint32_t u = 0; u < n_; ++u)
            if (E_.alive(u)) requests[u] = needs(u, u, s);
        collect(tag + ":main:collect", RoundKind::Protocol, requests);

        std::vector<std::vector<Value>> values(n_);
        std::vector<Send> sends;
        for (std::uint32_t u = 0; u < n_; ++u)
            if (E_.alive(u)) {
                values[u] = simulate(u, u, s, t);
                sends.push_back({u, u, t, &values[u]});
            }
        checkpoint(tag + ":main:checkpoint", RoundKind::Protocol, sends);
        for (std::uint32_t u = 0; u < n_; ++u)
            if (E_.alive(u)) own_[u] = std::move(values[u]);

        BingoCard card(n_);
        for (std::uint32_t v = 0; v < n_; ++v)
            if (!part_complete(t, v)) card.mark_missing(v);
        report.missing_after_main = card.missing().size();
        report.main_rounds = E_.ledger().protocol_rounds - rounds_before;

        const std::size_t log_n = static_cast<std::size_t>(std::bit_width(n_ - 1));
        const std::size_t cap = 4 * (c_ + 4 * log_n) + 16;
        while (!card.done()) {
            if (report.attempts >= cap) throw std::logic_error("attempt loop did not converge");
            run_attempt(e, report.attempts, s, t, card);
            ++report.attempts;
        }
        report.attempt_rounds = E_.ledger().protocol_rounds - rounds_before - report.main_rounds;
        E_.ledger().attempts_per_epoch.push_back(report.attempts);
        result_.attempts_total += report.attempts;
        result_.max_attempts_per_epoch = std::max(result_.max_attempts_per_epoch, report.attempts);
        result_.epochs.push_back(report);
    }

    void run_attempt(std::size_t e, std::size_t a, std::size_t s, std::size_t t, BingoCard& card) {
        const auto alive = E_.membership();
        const auto missing = card.missing();
        const auto plan = plan_attempt(alive, missing, n_, c_);
        const std::string tag = "epoch:" + std::to_string(e) + ":attempt:" + std::to_string(a);

        std::size_t slots = 0;
        for (const auto& b : plan.batches) slots = std::max(slots, b.size());
        if (opt_.pipeline_collect) {
            std::vector<std::vector<CwKey>> requests(n_);
            for (std::size_t j = 0; j < plan.batches.size(); ++j)
                for (auto x : plan.groups[j])
                    for (auto v : plan.batches[j])
                        for (const auto& k : needs(x, v, s)) requests[x].push_back(k);
            collect(tag + ":collect", RoundKind::Protocol, requests);
        }
        for (std::size_t k = 0; k < slots; ++k) {
            if (!opt_.pipeline_collect) {
                std::vector<std::vector<CwKey>> requests(n_);
                for (std::size_t j = 0; j < plan.batches.size(); ++j)
                    if (k < plan.batches[j].size())
                        for (auto x : plan.groups[j]) requests[x] = needs(x, plan.batches[j][k], s);
                collect(tag + ":collect", RoundKind::Protocol, requests);
            }
            std::vector<std::vector<Value>> values(n_);
            std::vector<Send> sends;
            for (std::size_t j = 0; j < plan.batches.size(); ++j) {
                if (k >= plan.batches[j].size()) continue;
                const auto v = plan.batches[j][k];
                for (auto x : plan.groups[j])
                    if (E_.alive(x)) {
                        values[x] = simulate(x, v, s, t);
                        sends.push_back({x, v, t, &values[x]});
                    }
            }
            checkpoint(tag + ":checkpoint", RoundKind::Protocol, sends);
        }
        std::size_t progress = 0;
        for (const auto& b : plan.batches)
            for (auto v : b)
                if (part_complete(t, v)) {
                    card.mark_done(v);
                    ++progress;
                }
        if (plan.case_a) result_.min_case_a_progress = std::min(result_.min_case_a_progress, progress);
    }

    std::uint32_t decode_target(std::uint32_t u) const { return static_cast<std::uint32_t>((u + 1) % n_); }

    void decode_phase() {
        const std::size_t d = C_.depth();
        reset_known(d);
        for (auto& set : decoded_) set.clear();
        std::vector<std::vector<CwKey>> requests(n_);
        for (std::uint32_t u = 0; u < n_; ++u)
            if (E_.alive(u)) requests[u] = codewords_of_part(d, decode_target(u));
        collect("decode", RoundKind::Decode, requests);
        for (std::uint32_t u = 0; u < n_; ++u) {
            DecodeOutcome out;
            out.collector = u;
            out.target = decode_target(u);
            out.alive = E_.alive(u);
            if (out.alive)
                for (auto gate : S_.part(d, out.target)) {
                    if (!have_[u][gate]) throw std::logic_error("decode phase left a gap");
                    out.values.push_back(known_[u][gate]);
                }
            result_.decodes.push_back(std::move(out));
        }
    }

    // Harness-side check: rebuild V_D from what alive holders store. Charges
    // no rounds and is not part of the protocol.
    void verify_outputs() {
        const std::size_t d = C_.depth();
        result_.outputs.assign(C_.layer(d).size(), 0);
        result_.outputs_recovered = true;
        for (std::uint32_t w = 0; w < n_; ++w)
            for (const auto& k : codewords_of_part(d, w)) {
                const std::uint32_t base = group_of(k) * static_cast<std::uint32_t>(g_);
                std::vector<Shard> shards;
                for (std::uint32_t i = 0; i < g_; ++i) {
                    if (!E_.alive(base + i)) continue;
                    auto it = store_[base + i].find(pack(k));
                    if (it != store_[base + i].end()) shards.push_back({i, it->second});
                }
                if (shards.size() < params_.message_length) {
                    result_.outputs_recovered = false;
                    continue;
                }
                auto state = decode_state(shards, params_, bits_);
                std::size_t at = 0;
                for (auto j : pieces_in(k))
                    for (auto gate : S_.pieces(d, w)[j]) {
                        Value v = state.at(at++);
                        if (gate != kVirtualGate) result_.outputs[gate] = v;
                    }
            }
    }

    const ProtocolInput& in_;
    ProtocolOptions opt_;
    std::size_t g_;
    std::size_t groups_ = 1;
    std::size_t c_ = 2;
    CodeParams params_;
    EpochPlan plan_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<Fp>>> store_;
    std::unordered_map<std::uint64_t, std::size_t> width_;  // complete codewords
    std::vector<std::unordered_set<std::uint64_t>> decoded_;
    std::vector<std::vector<CwKey>> needs_;
    std::vector<bool> cache_valid_;
    ProtocolResult result_;
};

class NonfaultyRunner : Network {
public:
    NonfaultyRunner(const ProtocolInput& in, Engine& engine) : Network(in, engine), in_(in) {}

    NonfaultyResult run() {
        NonfaultyResult res;
        shuffle(in_, false);
        const std::size_t depth = C_.depth();
        for (std::size_t l = 1; l <= depth; ++l) {
            reset_known(l - 1);
            for (std::uint32_t u = 0; u < n_; ++u) learn_own(u, l - 1);
            // One demand per (gate, reader part), packed first-fit.
            std::vector<Message> demands;
            for (std::uint32_t u = 0; u < n_; ++u) {
                std::unordered_set<std::uint32_t> asked;
                for (auto gate : S_.part(l, u))
                    for (const auto& w : C_.layer(l)[gate].in) {
                        std::uint32_t from = S_.part_of(l - 1, w.index);
                        if (from == u || !asked.insert(w.index).second) continue;
                        demands.push_back({from, u, w.index, static_cast<std::uint16_t>(bits_),
                                           own_[from][pos_[l - 1][w.index]]});
                    }
            }
            if (!demands.empty()) {
                E_.set_phase("layer:" + std::to_string(l) + ":route");
                std::vector<std::vector<Message>> batches;
                std::vector<std::vector<std::size_t>> outs, ins;
                for (const auto& m : demands) {
                    std::size_t b = 0;
                    while (b < batches.size() && (outs[b][m.src] >= n_ || ins[b][m.dst] >= n_)) ++b;
                    if (b == batches.size()) {
                        batches.emplace_back();
                        outs.emplace_back(n_, 0);
                        ins.emplace_back(n_, 0);
                    }
                    batches[b].push_back(m);
                    ++outs[b][m.src];
                    ++ins[b][m.dst];
                }
                const std::size_t before = E_.ledger().protocol_rounds;
                for (const auto& batch : batches)
                    for (const auto& m : E_.route(batch, RoundKind::Protocol)) {
                        known_[m.dst][m.tag] = m.word;
                        have_[m.dst][m.tag] = 1;
                    }
                res.layer_rounds.emplace_back(l, E_.ledger().protocol_rounds - before);
            }
            if (E_.failed_count() != 0) throw ModelViolation("failure during a failure-free execution");
            for (std::uint32_t u = 0; u < n_; ++u) own_[u] = simulate(u, u, l - 1, l);
        }
        res.outputs.assign(C_.layer(depth).size(), 0);
        for (std::uint32_t u = 0; u < n_; ++u) {
            const auto& gates = S_.part(depth, u);
            for (std::size_t i = 0; i < gates.size(); ++i) res.outputs[gates[i]] = own_[u][i];
        }
        return res;
    }

private:
    const ProtocolInput& in_;
};

}  // namespace

ProtocolResult run_faulty(const ProtocolInput& input, Engine& engine, const ProtocolOptions& options) {
    return FaultyRunner(input, engine, options).run();
}

ProtocolResult run_faulty_sublinear(const ProtocolInput& input, Engine& engine,
                                    const ProtocolOptions& options) {
    check_input(input);
    if (input.scheme->group_size() < engine.config().fault_group())
        throw std::invalid_argument("pieces must be at least n^chi gates");
    return FaultyRunner(input, engine, options).run();
}

NonfaultyResult run_nonfaulty(const ProtocolInput& input, Engine& engine) {
    return NonfaultyRunner(input, engine).run();
}

}  // namespace ftclique
