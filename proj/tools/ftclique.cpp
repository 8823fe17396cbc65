/**************************************************************************
 * ftclique.cpp
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

// ftclique run | sweep | verify | plot
//
// Exit status of `run`: 0 correct, 1 incorrect output, 2 invalid
// configuration, 3 fault-model violation by the adversary.

#include "ftclique/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace ftclique;

void add_run_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--workload", cfg.workload, "Workload name")->capture_default_str();
    cmd->add_option("--n", cfg.n, "Number of nodes")->capture_default_str();
    cmd->add_option("--c", cfg.c, "Fault parameter (c divides n)")->capture_default_str();
    cmd->add_option("--chi", cfg.chi, "Fault exponent; < 1 selects the sublinear model")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Seed for inputs and the random adversary")->capture_default_str();
    cmd->add_option("--route-cost", cfg.route_cost, "Rounds per routing invocation")->capture_default_str();
    cmd->add_option("--b", cfg.b, "Bandwidth constant: messages and symbols carry b*ceil(log2 n) bits")
        ->capture_default_str();
    cmd->add_flag("--pipeline-collect", cfg.pipeline_collect, "Collect a batch's codewords once up front");
}

int cmd_run(const RunConfig& cfg, const std::string& out) {
    RunRecord rec;
    try {
        rec = run_once(cfg);
    } catch (const ModelViolation& e) {
        std::cerr << "model violation: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    }
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out);
        if (!file) {
            std::cerr << "cannot write " << out << '\n';
            return 2;
        }
        os = &file;
    }
    *os << csv_header() << '\n' << csv_row(rec) << '\n';
    return rec.correct ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crash-tolerant Congested Clique simulator"};
    app.set_config("--config", "", "key=value configuration file; flags override it");
    app.require_subcommand(0, 1);

    RunConfig run_cfg;
    std::string out, trace;
    auto* run = app.add_subcommand("run", "One simulation, one CSV row");
    add_run_flags(run, run_cfg);
    run->add_option("--adversary", run_cfg.adversary, "none | random:<rate> | greedy | worst:<k> | script:<path>")
        ->capture_default_str();
    run->add_flag("--nonfaulty", run_cfg.nonfaulty, "Use the failure-free runner");
    run->add_option("--trace", trace, "Per-round trace file");
    run->add_option("--out", out, "CSV output file (default stdout)");

    SweepConfig sweep_cfg;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Grid of runs as CSV with a ratio column");
    add_run_flags(sweep, sweep_cfg.base);
    sweep->add_option("--ns", sweep_cfg.ns, "Values of n")->delimiter(',')->capture_default_str();
    sweep->add_option("--cs", sweep_cfg.cs, "Values of c")->delimiter(',')->capture_default_str();
    sweep->add_option("--chis", sweep_cfg.chis, "Values of chi")->delimiter(',')->capture_default_str();
    sweep->add_option("--adversaries", sweep_cfg.adversaries, "Adversary specs")->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--seeds", sweep_cfg.seeds, "Seeds per grid point")->capture_default_str();
    sweep->add_option("--threads", sweep_cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sweep->add_option("--out", sweep_out, "CSV output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Run the acceptance suites");

    std::string csv_in, plot_dir = ".";
    auto* plot = app.add_subcommand("plot", "SVG plots from a sweep CSV");
    plot->add_option("csv", csv_in, "Sweep CSV")->required();
    plot->add_option("--out-dir", plot_dir, "Directory for the images")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (run->parsed()) {
        run_cfg.trace = trace;
        return cmd_run(run_cfg, out);
    }
    if (sweep->parsed()) {
        std::ofstream file;
        std::ostream* os = &std::cout;
        if (!sweep_out.empty()) {
            file.open(sweep_out);
            if (!file) {
                std::cerr << "cannot write " << sweep_out << '\n';
                return 2;
            }
            os = &file;
        }
        cmd_sweep(sweep_cfg, *os);
        return 0;
    }
    if (verify->parsed()) {
        auto results = run_acceptance(&std::cerr);
        bool all = true;
        for (const auto& r : results) {
            std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << " [" << r.detail
                      << "]\n";
            all = all && r.pass;
        }
        return all ? 0 : 1;
    }
    if (plot->parsed()) {
        std::ifstream in(csv_in);
        if (!in) {
            std::cerr << "cannot read " << csv_in << '\n';
            return 2;
        }
        try {
            for (const auto& p : cmd_plot(in, plot_dir)) std::cout << p << '\n';
        } catch (const std::exception& e) {
            std::cerr << "plot: " << e.what() << '\n';
            return 2;
        }
        return 0;
    }
    std::cout << app.help();
    return 0;
}
