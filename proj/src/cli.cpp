/**************************************************************************
 * cli.cpp
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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace ftclique {

SimConfig RunConfig::sim_config() const {
    SimConfig s;
    s.n = n;
    s.c = c;
    s.chi = chi;
    s.b = b;
    s.route_cost = route_cost;
    s.seed = seed;
    return s;
}

RunRecord run_once(const RunConfig& config) {
    const SimConfig sim = config.sim_config();
    sim.validate();
    return run_once(config, make_adversary(config.adversary, sim));
}

RunRecord run_once(const RunConfig& config, std::unique_ptr<Adversary> adversary) {
    const auto start = std::chrono::steady_clock::now();
    const SimConfig sim = config.sim_config();
    sim.validate();
    Workload w = make_workload(config.workload, config.n, config.chi, config.b, config.seed);

    RunRecord rec;
    rec.n = config.n;
    rec.c = config.c;
    rec.chi = config.chi;
    rec.workload = config.workload;
    rec.adversary = adversary ? adversary->name() : "none";
    rec.seed = config.seed;

    Engine engine(sim, std::move(adversary));
    std::ofstream trace;
    if (!config.trace.empty()) {
        trace.open(config.trace);
        if (!trace) throw std::invalid_argument("cannot write trace file " + config.trace);
        engine.set_trace(&trace);
    }
    ProtocolInput input{&w.circuit, &w.scheme, w.inputs, w.initial_owner};

    if (config.nonfaulty) {
        auto res = run_nonfaulty(input, engine);
        rec.correct = res.outputs == w.expected;
    } else {
        ProtocolOptions opt;
        opt.pipeline_collect = config.pipeline_collect;
        auto res = config.chi < 1.0 ? run_faulty_sublinear(input, engine, opt) : run_faulty(input, engine, opt);
        bool ok = res.outputs_recovered && res.outputs == w.expected;
        const std::size_t d = w.circuit.depth();
        for (const auto& dec : res.decodes) {
            if (!dec.alive) continue;
            const auto& gates = w.scheme.part(d, dec.target);
            for (std::size_t i = 0; i < gates.size() && ok; ++i) ok = dec.values[i] == w.expected[gates[i]];
        }
        rec.correct = ok;
        rec.attempts_total = res.attempts_total;
        rec.max_attempts_per_epoch = res.max_attempts_per_epoch;
        rec.min_group_alive = res.min_group_alive;
        rec.group_threshold = w.scheme.group_size() / config.c;
        rec.min_case_a_progress = res.min_case_a_progress;
        rec.input_width = res.input_width;
    }
    const auto& led = engine.ledger();
    rec.quiet_rounds = led.quiet_rounds;
    rec.protocol_rounds = led.protocol_rounds;
    rec.decode_rounds = led.decode_rounds;
    rec.failures = engine.failed_count();
    rec.max_sent_in_round = led.max_sent_in_round;
    rec.max_received_in_round = led.max_received_in_round;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

double round_ratio(const RunRecord& r) {
    const double n = static_cast<double>(r.n), c = static_cast<double>(r.c);
    return static_cast<double>(r.protocol_rounds) / (c * c * std::cbrt(n) * std::log2(n));
}

std::string csv_header(bool with_ratio) {
    std::string h =
        "n,c,chi,workload,adversary,seed,quiet_rounds,protocol_rounds,decode_rounds,attempts_total,"
        "max_attempts_per_epoch,correct,wall_ms";
    if (with_ratio) h += ",ratio";
    return h;
}

std::string csv_row(const RunRecord& r, bool with_ratio) {
    std::ostringstream os;
    os << r.n << ',' << r.c << ',' << r.chi << ',' << r.workload << ',' << r.adversary << ',' << r.seed << ','
       << r.quiet_rounds << ',' << r.protocol_rounds << ',' << r.decode_rounds << ',' << r.attempts_total << ','
       << r.max_attempts_per_epoch << ',' << (r.correct ? 1 : 0) << ',' << std::fixed << std::setprecision(3)
       << r.wall_ms;
    if (with_ratio) os << ',' << std::setprecision(6) << round_ratio(r);
    return os.str();
}

std::size_t cmd_sweep(const SweepConfig& config, std::ostream& csv) {
    struct Job {
        RunConfig cfg;
    };
    std::vector<Job> jobs;
    for (auto n : config.ns)
        for (auto c : config.cs)
            for (auto chi : config.chis)
                for (const auto& adv : config.adversaries)
                    for (std::size_t s = 0; s < config.seeds; ++s) {
                        RunConfig cfg = config.base;
                        cfg.n = n;
                        cfg.c = c;
                        cfg.chi = chi;
                        cfg.adversary = adv;
                        cfg.seed = config.base.seed + s;
                        cfg.trace.clear();
                        jobs.push_back({cfg});
                    }
    std::vector<std::string> rows(jobs.size());
    std::vector<bool> ready(jobs.size(), false);
    std::size_t next_out = 0;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    csv << csv_header(true) << '\n';
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= jobs.size()) return;
            std::string row;
            try {
                row = csv_row(run_once(jobs[i].cfg), true);
            } catch (const std::exception&) {
                RunRecord r;
                r.n = jobs[i].cfg.n;
                r.c = jobs[i].cfg.c;
                r.chi = jobs[i].cfg.chi;
                r.workload = jobs[i].cfg.workload;
                r.adversary = jobs[i].cfg.adversary;
                r.seed = jobs[i].cfg.seed;
                row = csv_row(r, true);
            }
            std::lock_guard<std::mutex> lock(mu);
            rows[i] = std::move(row);
            ready[i] = true;
            while (next_out < jobs.size() && ready[next_out]) csv << rows[next_out++] << '\n';
        }
    };
    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    csv.flush();
    return jobs.size();
}

std::pair<std::size_t, std::size_t> batch_shrink_check(std::size_t max_n, bool mutant) {
    std::size_t bad = 0, checked = 0;
    for (std::size_t c : {2, 3})
        for (std::size_t n = c; n <= max_n; n += c) {
            const std::size_t budget = (c - 1) * n / c;
            std::vector<std::uint32_t> ids(n);
            for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
            for (std::size_t f = 0; f <= budget; ++f) {
                const std::size_t remain = budget - f;
                for (std::size_t fc = 3 * c; fc <= std::min(f, n - f); ++fc) {
                    std::span<const std::uint32_t> alive(ids.data() + f, n - f);
                    std::span<const std::uint32_t> missing(ids.data(), fc);
                    auto plan = plan_attempt(alive, missing, n, c);
                    if (mutant) plan.multiplicity = (n - f) / fc;
                    for (std::size_t fp = 0; 2 * fp < remain; ++fp) {
                        ++checked;
                        const std::size_t lost = worst_case_failed_batches(plan, fp);
                        if (4 * lost > plan.batch_count + 3) ++bad;  // lost > ceil(batches / 4)
                    }
                }
            }
        }
    return {bad, checked};
}

// ---------------------------------------------------------------------- plots

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    return out;
}

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, bool bars) {
    const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 60;
    double xmin = 1e300, xmax = -1e300, ymax = 0;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= 0) ymax = 1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
       << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << xlabel
       << "</text>\n"
       << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 18 " << (T + H - B) / 2
       << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        double y = ymax * k / 4;
        os << "<text class=\"ytick\" x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << y << "</text>\n";
    }
    std::vector<double> xs;
    for (const auto& s : series)
        for (auto [x, y] : s.points) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs)
        os << "<text class=\"xtick\" x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << x << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* col = colors[i % 6];
        if (bars) {
            const double width = std::max(4.0, (W - L - R) / (xs.size() + 1) / (series.size() + 1));
            for (auto [x, y] : s.points)
                os << "<rect class=\"bar\" data-x=\"" << x << "\" data-y=\"" << y << "\" x=\""
                   << px(x) - width * series.size() / 2 + width * i << "\" y=\"" << py(y) << "\" width=\"" << width
                   << "\" height=\"" << H - B - py(y) << "\" fill=\"" << col << "\"/>\n";
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
            for (auto [x, y] : s.points) os << px(x) << ',' << py(y) << ' ';
            os << "\"/>\n";
            for (auto [x, y] : s.points)
                os << "<circle class=\"point\" data-x=\"" << x << "\" data-y=\"" << y << "\" cx=\"" << px(x)
                   << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
        }
        os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 18 * (i + 1) << "\" fill=\"" << col << "\">"
           << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace

std::vector<std::string> cmd_plot(std::istream& csv, const std::string& out_dir) {
    std::string line;
    if (!std::getline(csv, line) || line.empty()) throw std::invalid_argument("empty CSV");
    const auto head = split(line);
    auto col = [&](const std::string& name) {
        auto it = std::find(head.begin(), head.end(), name);
        if (it == head.end()) throw std::invalid_argument("CSV lacks column '" + name + "'");
        return static_cast<std::size_t>(it - head.begin());
    };
    const std::size_t cn = col("n"), cc = col("c"), cr = col("protocol_rounds"), ca = col("max_attempts_per_epoch"),
                      cq = col("quiet_rounds");
    // c -> n -> (sum of rounds, count)
    std::map<double, std::map<double, std::pair<double, double>>> rounds;
    std::map<double, double> attempts;
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() < head.size()) throw std::invalid_argument("short CSV row: " + line);
        if (std::stod(cells[cq]) == 0) continue;  // flagged row: the run never started
        const double n = std::stod(cells[cn]), c = std::stod(cells[cc]);
        auto& acc = rounds[c][n];
        acc.first += std::stod(cells[cr]);
        acc.second += 1;
        attempts[std::stod(cells[ca])] += 1;
        ++rows;
    }
    if (rows == 0) throw std::invalid_argument("CSV has no completed runs");
    std::vector<Series> lines;
    for (const auto& [c, by_n] : rounds) {
        Series s;
        std::ostringstream label;
        label << "c = " << c;
        s.label = label.str();
        for (const auto& [n, acc] : by_n) s.points.emplace_back(n, acc.first / acc.second);
        lines.push_back(std::move(s));
    }
    Series hist{"runs", {}};
    for (const auto& [a, count] : attempts) hist.points.emplace_back(a, count);

    std::filesystem::create_directories(out_dir);
    const std::string p1 = (std::filesystem::path(out_dir) / "rounds_vs_n.svg").string();
    const std::string p2 = (std::filesystem::path(out_dir) / "attempts_hist.svg").string();
    std::ofstream(p1) << svg_chart("mean protocol rounds vs n", "n", "protocol rounds", lines, false);
    std::ofstream(p2) << svg_chart("max attempts per epoch", "attempts", "runs", {hist}, true);
    return {p1, p2};
}

}  // namespace ftclique
