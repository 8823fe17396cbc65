/**************************************************************************
 * test_engine.cpp
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

#include <doctest.h>

#include <map>
#include <sstream>

using namespace ftclique;

namespace {

SimConfig config(std::size_t n, std::size_t c) {
    SimConfig cfg;
    cfg.n = n;
    cfg.c = c;
    cfg.keep_delivery_log = true;
    return cfg;
}

Message msg(std::uint32_t s, std::uint32_t d, std::uint16_t bits = 3, std::uint64_t w = 0) {
    return {s, d, 0, bits, w};
}

// Fails a fixed set at a fixed round.
class FixedAdversary : public Adversary {
public:
    FixedAdversary(std::size_t round, std::vector<std::uint32_t> ids) : round_(round), ids_(std::move(ids)) {}
    std::vector<std::uint32_t> observe(const PublicView& v) override {
        return v.round == round_ ? ids_ : std::vector<std::uint32_t>{};
    }
    std::string name() const override { return "fixed"; }

private:
    std::size_t round_;
    std::vector<std::uint32_t> ids_;
};

}  // namespace

TEST_CASE("config validation and derived sizes") {
    auto cfg = config(8, 2);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.message_bits() == 3);
    CHECK(cfg.budget() == 4);
    CHECK(config(64, 4).budget() == 48);
    cfg.chi = 0.5;
    cfg.n = 64;
    CHECK(cfg.fault_group() == 8);
    CHECK(cfg.budget() == 4);
    CHECK_THROWS_AS(config(8, 3).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(8, 1).validate(), std::invalid_argument);
}

TEST_CASE("bandwidth caps") {
    Engine e(config(8, 2), make_no_adversary());
    CHECK_NOTHROW(e.step_round({msg(0, 1), msg(1, 0), msg(2, 3)}, RoundKind::Protocol));
    CHECK_THROWS_AS(e.step_round({msg(0, 1), msg(0, 1)}, RoundKind::Protocol), CapViolation);
    CHECK_THROWS_AS(e.step_round({msg(0, 0)}, RoundKind::Protocol), CapViolation);
    CHECK_THROWS_AS(e.step_round({msg(0, 1, 4)}, RoundKind::Protocol), CapViolation);
    CHECK_THROWS_AS(e.step_round({msg(0, 9)}, RoundKind::Protocol), CapViolation);
    std::vector<Message> flood;
    for (std::uint32_t d = 1; d < 8; ++d) flood.push_back(msg(0, d));
    CHECK_NOTHROW(e.step_round(flood, RoundKind::Protocol));
}

TEST_CASE("failed nodes neither send nor receive") {
    Engine e(config(8, 2), std::make_unique<FixedAdversary>(2, std::vector<std::uint32_t>{3}));
    auto got = e.step_round({msg(3, 1), msg(1, 3)}, RoundKind::Protocol);
    CHECK(got.size() == 2);
    got = e.step_round({msg(3, 1), msg(1, 3), msg(1, 2)}, RoundKind::Protocol);
    REQUIRE(got.size() == 1);
    CHECK(got[0].dst == 2);
    CHECK_FALSE(e.alive(3));
    CHECK(e.failed_count() == 1);
    CHECK(e.membership() == std::vector<std::uint32_t>{0, 1, 2, 4, 5, 6, 7});
    CHECK(e.ledger().failures == std::vector<std::pair<std::size_t, std::uint32_t>>{{2, 3}});
}

TEST_CASE("fault model violations") {
    Engine quiet(config(8, 2), std::make_unique<FixedAdversary>(1, std::vector<std::uint32_t>{0}));
    CHECK_THROWS_AS(quiet.step_round({}, RoundKind::Quiet), ModelViolation);

    Engine over(config(8, 2), std::make_unique<FixedAdversary>(1, std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
    CHECK_THROWS_AS(over.step_round({}, RoundKind::Protocol), ModelViolation);

    Engine full(config(8, 2), std::make_unique<FixedAdversary>(1, std::vector<std::uint32_t>{0, 1, 2, 3}));
    CHECK_NOTHROW(full.step_round({}, RoundKind::Protocol));
    CHECK(full.alive_count() == 4);
}

TEST_CASE("routing charges and load limit") {
    auto cfg = config(4, 2);
    cfg.route_cost = 3;
    Engine e(cfg, make_no_adversary());
    std::vector<Message> demands;
    for (std::uint32_t k = 0; k < 4; ++k) demands.push_back(msg(0, 1, 2, k));  // repeated pair is fine
    const auto got = e.route(demands, RoundKind::Protocol);
    CHECK(got.size() == 4);
    CHECK(e.ledger().protocol_rounds == 3);
    CHECK(e.ledger().route_invocations == 1);
    demands.push_back(msg(0, 2, 2));
    CHECK_THROWS_AS(e.route(demands, RoundKind::Protocol), CapViolation);
    CHECK_NOTHROW(e.route(demands, RoundKind::Quiet, 5));
    CHECK(e.ledger().quiet_rounds == 3);
}

TEST_CASE("ledger agrees with the delivery log") {
    Engine e(config(8, 2), make_random_adversary(0.1, 3));
    for (int r = 0; r < 30; ++r) {
        std::vector<Message> out;
        for (std::uint32_t s = 0; s < 8; ++s)
            for (std::uint32_t d = 0; d < 8; ++d)
                if (s != d && (s + d + r) % 3 == 0) out.push_back(msg(s, d));
        e.step_round(out, r < 2 ? RoundKind::Quiet : RoundKind::Protocol);
    }
    const auto& led = e.ledger();
    CHECK(led.quiet_rounds == 2);
    CHECK(led.protocol_rounds == 28);
    CHECK(led.rounds.size() == 30);
    CHECK(e.failed_count() <= e.budget());
    std::vector<std::size_t> recv(8), sent(8);
    std::map<std::size_t, std::size_t> per_round;
    for (const auto& d : led.deliveries) {
        ++recv[d.dst];
        ++sent[d.src];
        ++per_round[d.round];
    }
    CHECK(recv == led.received_per_node);
    for (const auto& rec : led.rounds) CHECK(per_round[rec.round] == rec.delivered);
    CHECK(led.max_sent_in_round <= 8);
    CHECK(led.max_received_in_round <= 8);
    for (const auto& [round, node] : led.failures) CHECK(round > 2);
}

TEST_CASE("random adversary is deterministic per seed") {
    auto run = [](std::uint64_t seed) {
        Engine e(config(16, 2), make_random_adversary(0.05, seed));
        for (int r = 0; r < 40; ++r) e.step_round({}, RoundKind::Protocol);
        return e.ledger().failures;
    };
    CHECK(run(4) == run(4));
    CHECK(run(4) != run(5));
}

TEST_CASE("scripts") {
    std::istringstream in(
        "# comment\n"
        "round 3 fail 1 2\n"
        "phase epoch:0:main:checkpoint after 1 fail 5\n");
    const auto entries = parse_script(in);
    REQUIRE(entries.size() == 2);
    CHECK_FALSE(entries[0].by_phase);
    CHECK(entries[0].round == 3);
    CHECK(entries[0].ids == std::vector<std::uint32_t>{1, 2});
    CHECK(entries[1].by_phase);
    CHECK(entries[1].prefix == "epoch:0:main:checkpoint");
    CHECK(entries[1].after == 1);

    Engine e(config(8, 2), make_scripted_adversary(entries, "t"));
    e.step_round({}, RoundKind::Protocol);
    e.set_phase("epoch:0:main:checkpoint");
    e.step_round({}, RoundKind::Protocol);  // round 2, phase round 0
    CHECK(e.alive_count() == 8);
    e.step_round({}, RoundKind::Protocol);  // round 3, phase round 1
    CHECK(e.alive_count() == 5);

    std::istringstream bad("round x fail 1\n");
    CHECK_THROWS(parse_script(bad));
    CHECK_THROWS(make_adversary("sometimes", config(8, 2)));
    CHECK(make_adversary("greedy", config(8, 2)) != nullptr);
}

TEST_CASE("trace lines") {
    std::ostringstream trace;
    Engine e(config(8, 2), make_no_adversary());
    e.set_trace(&trace);
    e.set_phase("p");
    e.step_round({msg(0, 1)}, RoundKind::Protocol);
    CHECK(trace.str().find("round 1 phase p kind protocol alive 8 sent 1 delivered 1") != std::string::npos);
}
