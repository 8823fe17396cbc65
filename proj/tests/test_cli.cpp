/**************************************************************************
 * test_cli.cpp
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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

using namespace ftclique;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ftclique_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("csv schema") {
    CHECK(csv_header() ==
          "n,c,chi,workload,adversary,seed,quiet_rounds,protocol_rounds,decode_rounds,"
          "attempts_total,max_attempts_per_epoch,correct,wall_ms");
    CHECK(csv_header(true).rfind(",ratio") != std::string::npos);
    RunRecord r;
    r.n = 8;
    r.c = 2;
    r.protocol_rounds = 48;
    CHECK(round_ratio(r) == doctest::Approx(48.0 / (4.0 * 2.0 * 3.0)));
}

TEST_CASE("every workload runs correctly") {
    for (const auto& name : workload_names()) {
        if (name == "fast-mm:strassen") continue;
        CAPTURE(name);
        RunConfig cfg;
        cfg.workload = name;
        cfg.n = name.rfind("fast-mm", 0) == 0 ? 64 : 8;
        cfg.c = 2;
        cfg.adversary = "random:0.1";
        const auto rec = run_once(cfg);
        CHECK(rec.correct);
        CHECK(rec.quiet_rounds > 0);
        CHECK(rec.decode_rounds == 2);
        CHECK(lines_of(csv_row(rec)).size() == 1);
    }
}

TEST_CASE("bad configurations") {
    RunConfig cfg;
    cfg.n = 9;
    cfg.c = 3;
    CHECK_THROWS_WITH_AS(run_once(cfg), doctest::Contains("perfect cube"), std::invalid_argument);
    cfg.n = 8;
    CHECK_THROWS_AS(run_once(cfg), std::invalid_argument);
    cfg.c = 2;
    cfg.workload = "fast-mm:strassen";
    CHECK_THROWS_AS(run_once(cfg), std::invalid_argument);
    cfg.workload = "bogus";
    CHECK_THROWS_AS(run_once(cfg), std::invalid_argument);

    const auto dir = scratch_dir("script");
    const auto path = (dir / "over.txt").string();
    std::ofstream(path) << "round 5 fail 0 1 2 3 4\n";
    RunConfig over;
    over.adversary = "script:" + path;
    CHECK_THROWS_AS(run_once(over), ModelViolation);
}

TEST_CASE("sweep rows are deterministic and complete") {
    SweepConfig sc;
    sc.ns = {8};
    sc.cs = {2, 3, 4};
    sc.seeds = 3;
    sc.threads = 4;
    std::ostringstream a, b;
    CHECK(cmd_sweep(sc, a) == 9);
    sc.threads = 1;
    cmd_sweep(sc, b);
    auto la = lines_of(a.str()), lb = lines_of(b.str());
    REQUIRE(la.size() == 10);
    REQUIRE(lb.size() == 10);
    // wall_ms varies between runs; ratio follows it.
    auto strip = [](std::string s) {
        s = s.substr(0, s.rfind(','));
        return s.substr(0, s.rfind(','));
    };
    for (std::size_t i = 0; i < la.size(); ++i) CHECK(strip(la[i]) == strip(lb[i]));
    std::size_t flagged = 0;
    for (std::size_t i = 1; i < la.size(); ++i) {
        const bool bad_c = la[i].rfind("8,3,", 0) == 0;
        if (bad_c) {
            ++flagged;
            CHECK(la[i].find(",0,0,0,0,0,0,") != std::string::npos);
        }
    }
    CHECK(flagged == 3);
}

TEST_CASE("plots mirror the csv") {
    SweepConfig sc;
    sc.ns = {8, 27};
    sc.cs = {3};
    sc.adversaries = {"greedy"};
    sc.seeds = 2;
    std::ostringstream csv;
    cmd_sweep(sc, csv);
    // n=8, c=3 is invalid and must be skipped by the plot.
    const auto dir = scratch_dir("plot");
    std::istringstream in(csv.str());
    const auto files = cmd_plot(in, dir.string());
    REQUIRE(files.size() == 2);
    for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);

    // The line chart plots the mean protocol rounds per n.
    std::map<double, std::pair<double, double>> sums;
    const auto rows = lines_of(csv.str());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<std::string> cells;
        std::istringstream ls(rows[i]);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        if (std::stod(cells[6]) == 0) continue;
        auto& acc = sums[std::stod(cells[0])];
        acc.first += std::stod(cells[7]);
        acc.second += 1;
    }
    const auto svg = slurp(files[0]);
    const std::regex point(R"re(class="point"[^>]*data-x="([^"]+)"[^>]*data-y="([^"]+)")re");
    std::set<std::pair<double, double>> plotted;
    for (std::sregex_iterator it(svg.begin(), svg.end(), point), end; it != end; ++it)
        plotted.insert({std::stod((*it)[1]), std::stod((*it)[2])});
    CHECK_FALSE(plotted.empty());
    REQUIRE(plotted.size() == 1);
    CHECK(plotted.begin()->first == 27);
    REQUIRE(sums.count(27) == 1);
    CHECK(plotted.begin()->second == doctest::Approx(sums[27].first / sums[27].second).epsilon(1e-4));

    std::istringstream empty("");
    CHECK_THROWS(cmd_plot(empty, dir.string()));
    std::istringstream header_only(csv_header() + "\n");
    CHECK_THROWS(cmd_plot(header_only, dir.string()));
}
