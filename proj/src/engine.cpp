/**************************************************************************
 * engine.cpp
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

#include "ftclique/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ftclique {

namespace {

std::size_t integer_power(std::size_t n, double chi) {
    double v = std::pow(static_cast<double>(n), chi);
    auto r = static_cast<std::size_t>(std::llround(v));
    if (r == 0 || std::fabs(v - static_cast<double>(r)) > 1e-6) return 0;
    return r;
}

bool is_checkpoint_phase(const std::string& phase) {
    static const std::string suffix = ":checkpoint";
    return phase.size() >= suffix.size() &&
           phase.compare(phase.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void SimConfig::validate() const {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (c < 2) throw std::invalid_argument("c must be at least 2");
    if (n % c != 0) throw std::invalid_argument("c must divide n");
    if (!(chi > 0.0 && chi <= 1.0)) throw std::invalid_argument("chi must lie in (0, 1]");
    if (b < 1) throw std::invalid_argument("b must be at least 1");
    if (route_cost < 1) throw std::invalid_argument("route_cost must be at least 1");
    std::size_t g = fault_group();
    if (g == 0) throw std::invalid_argument("n^chi must be an integer");
    if (n % g != 0) throw std::invalid_argument("n^chi must divide n");
    if (g % c != 0) throw std::invalid_argument("c must divide n^chi");
    if (message_bits() > 64) throw std::invalid_argument("messages wider than 64 bits");
}

unsigned SimConfig::message_bits() const {
    return b * static_cast<unsigned>(std::bit_width(n - 1));
}

std::size_t SimConfig::fault_group() const {
    if (chi >= 1.0) return n;
    return integer_power(n, chi);
}

std::size_t SimConfig::budget() const { return (c - 1) * fault_group() / c; }

const char* to_string(RoundKind k) {
    switch (k) {
    case RoundKind::Quiet: return "quiet";
    case RoundKind::Protocol: return "protocol";
    case RoundKind::Decode: return "decode";
    }
    return "?";
}

// ---------------------------------------------------------------- adversaries

namespace {

class NoAdversary final : public Adversary {
public:
    std::vector<std::uint32_t> observe(const PublicView&) override { return {}; }
    std::string name() const override { return "none"; }
};

class RandomAdversary final : public Adversary {
public:
    RandomAdversary(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {}
    std::vector<std::uint32_t> observe(const PublicView& v) override {
        std::vector<std::uint32_t> out;
        if (v.kind == RoundKind::Quiet) return out;
        std::size_t left = v.budget - v.failed;
        std::bernoulli_distribution coin(rate_);
        const auto& alive = *v.alive;
        for (std::uint32_t u = 0; u < alive.size() && out.size() < left; ++u)
            if (alive[u] && coin(rng_)) out.push_back(u);
        return out;
    }
    std::string name() const override {
        std::ostringstream os;
        os << "random:" << rate_;
        return os.str();
    }

private:
    double rate_;
    std::mt19937_64 rng_;
};

std::vector<std::uint32_t> alive_nodes(const SimulatorGroup& g, const std::vector<bool>& alive) {
    std::vector<std::uint32_t> out;
    for (auto u : g.nodes)
        if (alive[u]) out.push_back(u);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

class GreedyAdversary final : public Adversary {
public:
    std::vector<std::uint32_t> observe(const PublicView& v) override {
        if (v.kind == RoundKind::Quiet || v.phase_round != 0 || !v.groups ||
            !is_checkpoint_phase(*v.phase))
            return {};
        std::size_t left = v.budget - v.failed;
        std::vector<std::uint32_t> best;
        bool found = false;
        for (const auto& g : *v.groups) {
            auto nodes = alive_nodes(g, *v.alive);
            if (nodes.empty() || nodes.size() > left) continue;
            if (!found || nodes.size() < best.size()) {
                best = std::move(nodes);
                found = true;
            }
        }
        return best;
    }
    std::string name() const override { return "greedy"; }
};

class OwnerKiller final : public Adversary {
public:
    std::vector<std::uint32_t> observe(const PublicView& v) override {
        if (v.kind == RoundKind::Quiet || v.phase_round != 0 || !v.groups ||
            !is_checkpoint_phase(*v.phase))
            return {};
        std::vector<std::uint32_t> senders;
        for (const auto& g : *v.groups)
            for (auto u : g.nodes)
                if ((*v.alive)[u]) senders.push_back(u);
        std::sort(senders.begin(), senders.end());
        senders.erase(std::unique(senders.begin(), senders.end()), senders.end());
        std::size_t left = v.budget - v.failed;
        if (senders.size() > left) senders.resize(left);
        return senders;
    }
    std::string name() const override { return "worst:1"; }
};

class ScriptedAdversary final : public Adversary {
public:
    ScriptedAdversary(std::vector<ScriptEntry> entries, std::string label)
        : entries_(std::move(entries)), first_match_(entries_.size(), 0),
          matched_(entries_.size(), false), fired_(entries_.size(), false),
          label_(std::move(label)) {}

    std::vector<std::uint32_t> observe(const PublicView& v) override {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (fired_[i]) continue;
            const auto& e = entries_[i];
            bool fire = false;
            if (!e.by_phase) {
                fire = v.round == e.round;
            } else if (v.phase->rfind(e.prefix, 0) == 0) {
                if (!matched_[i]) {
                    matched_[i] = true;
                    first_match_[i] = v.round;
                }
                fire = v.round == first_match_[i] + e.after;
            }
            if (!fire) continue;
            fired_[i] = true;
            for (auto u : e.ids)
                if (u < v.alive->size() && (*v.alive)[u]) out.push_back(u);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    std::string name() const override { return label_; }

private:
    std::vector<ScriptEntry> entries_;
    std::vector<std::size_t> first_match_;
    std::vector<bool> matched_;
    std::vector<bool> fired_;
    std::string label_;
};

}  // namespace

std::unique_ptr<Adversary> make_no_adversary() { return std::make_unique<NoAdversary>(); }

std::unique_ptr<Adversary> make_random_adversary(double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("random rate must lie in [0, 1]");
    return std::make_unique<RandomAdversary>(rate, seed);
}

std::unique_ptr<Adversary> make_greedy_adversary() { return std::make_unique<GreedyAdversary>(); }

std::unique_ptr<Adversary> make_owner_killer_adversary() { return std::make_unique<OwnerKiller>(); }

std::vector<ScriptEntry> parse_script(std::istream& in) {
    std::vector<ScriptEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        auto bad = [&](const std::string& why) {
            return std::invalid_argument("script line " + std::to_string(lineno) + ": " + why);
        };
        ScriptEntry e;
        if (word == "round") {
            long long r = 0;
            if (!(ls >> r) || r < 1) throw bad("expected a round number >= 1");
            e.round = static_cast<std::size_t>(r);
        } else if (word == "phase") {
            e.by_phase = true;
            if (!(ls >> e.prefix)) throw bad("expected a phase prefix");
        } else {
            throw bad("unknown directive '" + word + "'");
        }
        if (!(ls >> word)) throw bad("expected 'fail'");
        if (e.by_phase && word == "after") {
            long long k = 0;
            if (!(ls >> k) || k < 0) throw bad("expected a round offset");
            e.after = static_cast<std::size_t>(k);
            if (!(ls >> word)) throw bad("expected 'fail'");
        }
        if (word != "fail") throw bad("expected 'fail'");
        long long id = 0;
        while (ls >> id) {
            if (id < 0) throw bad("negative node id");
            e.ids.push_back(static_cast<std::uint32_t>(id));
        }
        if (!ls.eof()) throw bad("malformed node id");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ScriptEntry> load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open script " + path);
    return parse_script(in);
}

std::unique_ptr<Adversary> make_scripted_adversary(std::vector<ScriptEntry> entries, std::string label) {
    return std::make_unique<ScriptedAdversary>(std::move(entries), std::move(label));
}

std::unique_ptr<Adversary> make_worst_case_adversary(int which, const SimConfig& config) {
    std::size_t n = config.n, f = config.budget();
    // Failed ids are spread so every fault group loses the same share.
    std::vector<std::uint32_t> ids;
    std::size_t g = config.fault_group();
    for (std::size_t k = 0; ids.size() < f; ++k) {
        std::size_t group = k % (n / g), member = g - 1 - k / (n / g);
        ids.push_back(static_cast<std::uint32_t>(group * g + member));
    }
    switch (which) {
    case 1:
        return make_owner_killer_adversary();
    case 2: {
        ScriptEntry e;
        e.by_phase = true;
        e.prefix = "epoch:0:main:checkpoint";
        e.ids = ids;
        return make_scripted_adversary({e}, "worst:2");
    }
    case 3: {
        std::vector<ScriptEntry> es;
        std::size_t third = (f + 2) / 3;
        const char* phases[] = {"epoch:0:main:checkpoint", "epoch:0:attempt:0:checkpoint",
                                "epoch:1:main:collect"};
        std::size_t pos = 0;
        for (const char* p : phases) {
            ScriptEntry e;
            e.by_phase = true;
            e.prefix = p;
            for (std::size_t k = 0; k < third && pos < ids.size(); ++k) e.ids.push_back(ids[pos++]);
            es.push_back(std::move(e));
        }
        // Whatever is left when the decode phase starts.
        ScriptEntry tail;
        tail.by_phase = true;
        tail.prefix = "decode";
        tail.ids = ids;
        es.push_back(std::move(tail));
        return make_scripted_adversary(std::move(es), "worst:3");
    }
    default:
        throw std::invalid_argument("worst-case adversaries are numbered 1 to 3");
    }
}

std::unique_ptr<Adversary> make_adversary(const std::string& spec, const SimConfig& config) {
    if (spec == "none") return make_no_adversary();
    if (spec == "greedy") return make_greedy_adversary();
    if (spec.rfind("random:", 0) == 0) {
        std::size_t used = 0;
        double rate = 0;
        try {
            rate = std::stod(spec.substr(7), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != spec.size() - 7)
            throw std::invalid_argument("bad random rate in '" + spec + "'");
        return make_random_adversary(rate, config.seed);
    }
    if (spec.rfind("worst:", 0) == 0) {
        int k = std::atoi(spec.c_str() + 6);
        return make_worst_case_adversary(k, config);
    }
    if (spec.rfind("script:", 0) == 0) return make_scripted_adversary(load_script(spec.substr(7)), spec);
    throw std::invalid_argument("unknown adversary '" + spec + "'");
}

// --------------------------------------------------------------------- engine

Engine::Engine(SimConfig config, std::unique_ptr<Adversary> adversary)
    : config_(config), adversary_(std::move(adversary)) {
    config_.validate();
    if (!adversary_) adversary_ = make_no_adversary();
    budget_ = config_.budget();
    alive_.assign(config_.n, true);
    alive_count_ = config_.n;
    ledger_.sent_per_node.assign(config_.n, 0);
    ledger_.received_per_node.assign(config_.n, 0);
}

std::vector<std::uint32_t> Engine::membership() const {
    std::vector<std::uint32_t> out;
    out.reserve(alive_count_);
    for (std::uint32_t u = 0; u < n(); ++u)
        if (alive_[u]) out.push_back(u);
    return out;
}

void Engine::set_phase(std::string label, std::vector<SimulatorGroup> groups) {
    phase_ = std::move(label);
    phase_round_ = 0;
    groups_ = std::move(groups);
}

void Engine::fail(const std::vector<std::uint32_t>& ids, RoundKind kind) {
    std::vector<std::uint32_t> fresh;
    for (auto u : ids) {
        if (u >= n()) throw ModelViolation("adversary named node " + std::to_string(u) + " out of range");
        if (alive_[u] && std::find(fresh.begin(), fresh.end(), u) == fresh.end()) fresh.push_back(u);
    }
    if (fresh.empty()) return;
    if (kind == RoundKind::Quiet)
        throw ModelViolation("failure of node " + std::to_string(fresh.front()) + " during quiet round " +
                             std::to_string(round_));
    if (failed_count() + fresh.size() > budget_)
        throw ModelViolation("failure budget " + std::to_string(budget_) + " exceeded in round " +
                             std::to_string(round_));
    for (auto u : fresh) {
        alive_[u] = false;
        --alive_count_;
        ledger_.failures.emplace_back(round_, u);
        failed_now_.push_back(u);
    }
}

void Engine::begin_round(RoundKind kind) {
    ++round_;
    failed_now_.clear();
    PublicView view;
    view.round = round_;
    view.kind = kind;
    view.phase = &phase_;
    view.phase_round = phase_round_;
    view.alive = &alive_;
    view.failed = failed_count();
    view.budget = budget_;
    view.groups = &groups_;
    fail(adversary_->observe(view), kind);
}

void Engine::check_caps(const std::vector<Message>& outbox, std::size_t limit, bool per_pair) const {
    std::vector<std::size_t> out(n(), 0), in(n(), 0);
    unsigned cap = config_.message_bits();
    for (const auto& m : outbox) {
        if (m.src >= n() || m.dst >= n()) throw CapViolation("message endpoint out of range");
        if (m.src == m.dst) throw CapViolation("node " + std::to_string(m.src) + " messaged itself");
        if (m.bits > cap)
            throw CapViolation("message of " + std::to_string(m.bits) + " bits exceeds " +
                               std::to_string(cap));
        if (++out[m.src] > limit)
            throw CapViolation("node " + std::to_string(m.src) + " sends more than " +
                               std::to_string(limit) + " messages");
        if (++in[m.dst] > limit)
            throw CapViolation("node " + std::to_string(m.dst) + " receives more than " +
                               std::to_string(limit) + " messages");
    }
    if (!per_pair) return;
    std::vector<std::uint64_t> pairs;
    pairs.reserve(outbox.size());
    for (const auto& m : outbox) pairs.push_back(std::uint64_t{m.src} << 32 | m.dst);
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
        throw CapViolation("two messages on one ordered pair in a round");
}

void Engine::finish_round(RoundKind kind, std::size_t sent, std::size_t delivered,
                          std::vector<std::uint32_t> failed) {
    switch (kind) {
    case RoundKind::Quiet: ++ledger_.quiet_rounds; break;
    case RoundKind::Protocol: ++ledger_.protocol_rounds; break;
    case RoundKind::Decode: ++ledger_.decode_rounds; break;
    }
    ++phase_round_;
    RoundRecord rec{round_, kind, phase_, alive_count_, sent, delivered, std::move(failed)};
    if (trace_) {
        *trace_ << "round " << rec.round << " phase " << (rec.phase.empty() ? "-" : rec.phase)
                << " kind " << to_string(kind) << " alive " << rec.alive << " sent " << sent
                << " delivered " << delivered << " failed";
        for (auto u : rec.failed) *trace_ << ' ' << u;
        *trace_ << '\n';
    }
    ledger_.rounds.push_back(std::move(rec));
}

std::vector<Message> Engine::step_round(const std::vector<Message>& outbox, RoundKind kind) {
    check_caps(outbox, n(), true);
    begin_round(kind);
    std::vector<Message> delivered;
    delivered.reserve(outbox.size());
    std::vector<std::size_t> out(n(), 0), in(n(), 0);
    std::size_t sent = 0;
    for (const auto& m : outbox) {
        if (!alive_[m.src]) continue;
        ++sent;
        ++out[m.src];
        ++ledger_.sent_per_node[m.src];
        if (!alive_[m.dst]) continue;
        ++in[m.dst];
        ++ledger_.received_per_node[m.dst];
        if (config_.keep_delivery_log) ledger_.deliveries.push_back({round_, m.src, m.dst});
        delivered.push_back(m);
    }
    for (std::size_t u = 0; u < n(); ++u) {
        ledger_.max_sent_in_round = std::max(ledger_.max_sent_in_round, out[u]);
        ledger_.max_received_in_round = std::max(ledger_.max_received_in_round, in[u]);
    }
    finish_round(kind, sent, delivered.size(), failed_now_);
    return delivered;
}

std::vector<Message> Engine::route(const std::vector<Message>& demands, RoundKind kind,
                                   std::size_t load_limit) {
    if (load_limit == 0) load_limit = n();
    check_caps(demands, load_limit, false);
    ++ledger_.route_invocations;
    std::vector<std::uint32_t> failed;
    for (std::size_t r = 0; r < config_.route_cost; ++r) {
        begin_round(kind);
        failed.insert(failed.end(), failed_now_.begin(), failed_now_.end());
        bool last = r + 1 == config_.route_cost;
        if (!last) finish_round(kind, 0, 0, failed_now_);
    }
    std::vector<Message> delivered;
    std::size_t sent = 0;
    for (const auto& m : demands) {
        if (!alive_[m.src]) continue;
        ++sent;
        ++ledger_.sent_per_node[m.src];
        if (!alive_[m.dst]) continue;
        ++ledger_.received_per_node[m.dst];
        if (config_.keep_delivery_log) ledger_.deliveries.push_back({round_, m.src, m.dst});
        delivered.push_back(m);
    }
    finish_round(kind, sent, delivered.size(), failed_now_);
    return delivered;
}

}  // namespace ftclique
