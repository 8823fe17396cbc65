/**************************************************************************
 * test_protocol.cpp
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
#include "ftclique/protocol.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

using namespace ftclique;

namespace {

std::vector<std::uint32_t> iota_ids(std::uint32_t from, std::uint32_t to) {
    std::vector<std::uint32_t> v(to - from);
    std::iota(v.begin(), v.end(), from);
    return v;
}

SimConfig sim(std::size_t n, std::size_t c, std::uint64_t seed = 1) {
    SimConfig cfg;
    cfg.n = n;
    cfg.c = c;
    cfg.seed = seed;
    cfg.keep_delivery_log = true;
    return cfg;
}

ProtocolInput input_of(const Workload& w) { return {&w.circuit, &w.scheme, w.inputs, w.initial_owner}; }

}  // namespace

TEST_CASE("attempt planner") {
    SUBCASE("more missing parts than alive nodes") {
        const auto alive = iota_ids(0, 12), missing = iota_ids(0, 13);
        const auto p = plan_attempt(alive, missing, 16, 2);
        CHECK(p.case_a);
        CHECK(p.batch_count == 12);
        CHECK(p.multiplicity == 1);
        CHECK(p.deferred == std::vector<std::uint32_t>{12});
    }
    SUBCASE("fewer missing parts than one batch") {
        const auto alive = iota_ids(8, 32), missing = iota_ids(0, 5);
        const auto p = plan_attempt(alive, missing, 32, 2);
        CHECK_FALSE(p.case_a);
        CHECK(p.batch_count == 1);
        CHECK(p.multiplicity == 24);
        CHECK(p.batches[0].size() == 5);
    }
    SUBCASE("last batch absorbs the remainder") {
        const auto alive = iota_ids(7, 32), missing = iota_ids(0, 14);
        const auto p = plan_attempt(alive, missing, 32, 2);
        CHECK(p.batch_count == 2);
        CHECK(p.batches[0].size() == 6);
        CHECK(p.batches[1].size() == 8);
        CHECK(p.multiplicity == 12);
        CHECK(p.leftover == 1);
        for (std::size_t j = 0; j < 2; ++j) CHECK(p.groups[j].size() == 12);
    }
    SUBCASE("nothing missing") {
        const auto alive = iota_ids(0, 8);
        const auto p = plan_attempt(alive, {}, 8, 2);
        CHECK(p.batch_count == 0);
    }
}

TEST_CASE("batch-shrink property by exhaustive enumeration") {
    // Planner invariants checked directly for every small configuration.
    std::size_t checked = 0;
    for (std::size_t c : {2u, 3u})
        for (std::size_t n = c; n <= 64; n += c) {
            const std::size_t budget = (c - 1) * n / c;
            for (std::size_t f = 0; f <= budget; ++f)
                // Missing parts belong to failed nodes, so F^c <= F.
                for (std::size_t fc = 3 * c; fc <= std::min(f, n - f); ++fc) {
                    const auto alive = iota_ids(static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(n));
                    const auto missing = iota_ids(0, static_cast<std::uint32_t>(fc));
                    const auto p = plan_attempt(alive, missing, n, c);
                    std::size_t parts = 0, sims = 0;
                    for (const auto& b : p.batches) parts += b.size();
                    for (const auto& g : p.groups) sims += g.size();
                    CHECK(parts + p.deferred.size() == fc);
                    CHECK(sims + p.leftover <= n - f);
                    if (p.case_a) continue;
                    for (std::size_t fp = 0; 2 * fp < budget - f; ++fp) {
                        const auto lost = worst_case_failed_batches(p, fp);
                        CHECK(lost <= (p.batch_count + 3) / 4);
                        ++checked;
                    }
                }
        }
    CHECK(checked > 1000);
    const auto [bad, total] = batch_shrink_check(64);
    CHECK(bad == 0);
    CHECK(total > 0);
    CHECK(batch_shrink_check(64, true).first > 0);
}

TEST_CASE("bingo card") {
    BingoCard card(4);
    CHECK(card.done());
    card.mark_missing(2);
    card.mark_missing(0);
    CHECK(card.missing() == std::vector<std::uint32_t>{0, 2});
    card.mark_done(0);
    CHECK(card.is_missing(2));
    card.mark_done(2);
    CHECK(card.done());
}

TEST_CASE("failure-free tolerant run needs no attempts") {
    const auto w = make_workload("semiring-mm:plus-times", 8, 1.0, 1, 3);
    Engine e(sim(8, 2), make_no_adversary());
    const auto res = run_faulty(input_of(w), e);
    CHECK(res.outputs_recovered);
    CHECK(res.outputs == w.expected);
    CHECK(res.attempts_total == 0);
    CHECK(e.ledger().quiet_rounds == 2 + 2 * res.input_width);
    for (const auto& d : res.decodes) {
        REQUIRE(d.alive);
        CHECK(d.target == (d.collector + 1) % 8);
    }
    CHECK(e.ledger().max_sent_in_round <= 8);
    CHECK(e.ledger().max_received_in_round <= 8);
}

TEST_CASE("scripted mid-epoch failures are tolerated") {
    const auto w = make_workload("semiring-mm:tropical", 8, 1.0, 1, 4);
    std::istringstream script("phase epoch:0:main:checkpoint after 1 fail 1 4 6\n");
    Engine e(sim(8, 2), make_scripted_adversary(parse_script(script), "mid"));
    const auto res = run_faulty(input_of(w), e);
    CHECK(e.failed_count() == 3);
    CHECK(res.outputs_recovered);
    CHECK(res.outputs == w.expected);
    CHECK(res.min_group_alive >= 4);
    for (const auto& d : res.decodes)
        if (d.alive) CHECK(d.values.size() == w.scheme.part(w.circuit.depth(), d.target).size());
}

TEST_CASE("adversaries over the full budget") {
    for (const char* adv : {"random:0.2", "greedy", "worst:1", "worst:2", "worst:3"}) {
        CAPTURE(adv);
        const auto w = make_workload("semiring-mm:plus-times", 8, 1.0, 1, 5);
        const auto cfg = sim(8, 4, 7);
        Engine e(cfg, make_adversary(adv, cfg));
        const auto res = run_faulty(input_of(w), e);
        CHECK(res.outputs_recovered);
        CHECK(res.outputs == w.expected);
        CHECK(e.failed_count() <= cfg.budget());
        CHECK(res.max_attempts_per_epoch <= 4 * (4 + 4 * 3) + 16);
    }
}

TEST_CASE("deterministic per seed") {
    auto once = [] {
        const auto w = make_workload("semiring-mm:plus-times", 8, 1.0, 1, 9);
        const auto cfg = sim(8, 2, 11);
        Engine e(cfg, make_adversary("random:0.1", cfg));
        const auto res = run_faulty(input_of(w), e);
        return std::pair{e.ledger().failures, e.ledger().total_rounds()};
    };
    CHECK(once() == once());
}

TEST_CASE("pipelined collection computes the same outputs") {
    const auto w = make_workload("semiring-mm:plus-times", 27, 1.0, 1, 2);
    const auto cfg = sim(27, 3, 3);
    Engine a(cfg, make_adversary("random:0.05", cfg));
    Engine b(cfg, make_adversary("random:0.05", cfg));
    const auto ra = run_faulty(input_of(w), a);
    ProtocolOptions opt;
    opt.pipeline_collect = true;
    const auto rb = run_faulty(input_of(w), b, opt);
    CHECK(ra.outputs == w.expected);
    CHECK(rb.outputs == w.expected);
}

TEST_CASE("sublinear runner at chi = 1 matches the linear one") {
    const auto w = make_workload("semiring-mm:plus-times", 8, 1.0, 1, 6);
    const auto cfg = sim(8, 2, 2);
    Engine a(cfg, make_adversary("greedy", cfg));
    Engine b(cfg, make_adversary("greedy", cfg));
    const auto ra = run_faulty(input_of(w), a);
    const auto rb = run_faulty_sublinear(input_of(w), b);
    CHECK(ra.outputs == rb.outputs);
    CHECK(a.ledger().total_rounds() == b.ledger().total_rounds());
}

TEST_CASE("sublinear fault model") {
    const auto w = make_workload("semiring-mm:plus-times", 64, 0.5, 1, 8);
    auto cfg = sim(64, 2, 4);
    cfg.chi = 0.5;
    Engine e(cfg, make_adversary("random:0.05", cfg));
    const auto res = run_faulty_sublinear(input_of(w), e);
    CHECK(res.outputs == w.expected);
    CHECK(e.failed_count() <= 4);
}

TEST_CASE("failure-free runner") {
    const auto w = make_workload("clique:sum-broadcast", 8, 1.0, 1, 1);
    Engine e(sim(8, 2), make_no_adversary());
    const auto res = run_nonfaulty(input_of(w), e);
    CHECK(res.outputs == w.expected);
    CHECK_FALSE(res.layer_rounds.empty());
    for (const auto& [layer, rounds] : res.layer_rounds) CHECK(rounds % 2 == 0);
}

TEST_CASE("malformed input is rejected") {
    const auto w = make_workload("clique:echo", 8, 1.0, 1, 1);
    auto in = input_of(w);
    in.inputs.pop_back();
    Engine e(sim(8, 2), make_no_adversary());
    CHECK_THROWS_AS(run_faulty(in, e), std::invalid_argument);
}
