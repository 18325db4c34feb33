// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.
//
// presto-sim: scenario runner, sweep driver, metrics engine and trace
// replayer for chain-based consensus protocols.
//
// Exit codes: 0 success, 2 config/usage error, 3 internal invariant
// violation, 4 replay mismatch.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "presto/analysis.hpp"
#include "presto/digest.hpp"
#include "presto/engine.hpp"
#include "presto/metrics.hpp"
#include "presto/utility.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace presto;

namespace {

unsigned worker_cap() {
    if (const char* env = std::getenv("PRESTO_SIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs jobs on up to PRESTO_SIM_THREADS workers; each job owns its result
/// slot, so outputs are ordered by submission regardless of scheduling.
void run_parallel(const std::vector<std::function<void()>>& jobs) {
    const unsigned workers = std::min<std::size_t>(worker_cap(), jobs.empty() ? 1 : jobs.size());
    if (workers <= 1) {
        for (const auto& job : jobs) job();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                jobs[i]();
            }
        });
    for (auto& t : pool) t.join();
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(errc::config_invalid, "cannot write '" + path.string() + "'");
    f << body;
}

// --- measures available to `sweep` ------------------------------------------

using MeasureFn = analysis::MeasureFn;

const std::map<std::string, MeasureFn>& measure_registry() {
    static const std::map<std::string, MeasureFn> registry = {
        {"throughput", [](const sim::Trace& t) { return metrics::throughput(t); }},
        {"messages_per_decision", [](const sim::Trace& t) { return metrics::message_complexity(t).total; }},
        {"block_msgs_per_block",
         [](const sim::Trace& t) { return metrics::message_complexity(t).block_msgs_per_block; }},
        {"pod_message_complexity",
         [](const sim::Trace& t) {
             const auto mc = metrics::message_complexity(t);
             const bool ibft = t.scenario.protocol == protocol::ProtocolKind::Ibft;
             const double centralized = ibft ? static_cast<double>(t.scenario.ibft.k) - 1.0
                                             : static_cast<double>(t.scenario.n_nodes) - 1.0;
             const double decentralized = ibft ? mc.total : mc.block_msgs_per_block;
             return metrics::pod(decentralized, centralized, /*positive_measure=*/false).ratio;
         }},
        {"finalized_blocks",
         [](const sim::Trace& t) { return static_cast<double>(strategy::reference_chain(t).size()); }},
        {"chain_growth",
         [](const sim::Trace& t) {
             return static_cast<double>(strategy::reference_chain(t).size()) / t.horizon;
         }},
        {"forks", [](const sim::Trace& t) { return static_cast<double>(metrics::detect_forks(t).size()); }},
        {"orphans",
         [](const sim::Trace& t) { return static_cast<double>(metrics::detect_orphans(t).size()); }},
        {"overturns",
         [](const sim::Trace& t) { return static_cast<double>(metrics::detect_overturns(t).size()); }},
        {"fairness_epsilon",
         [](const sim::Trace& t) { return metrics::fairness_measure(t, t.scenario.utility).epsilon; }},
        {"safety_violations",
         [](const sim::Trace& t) {
             return static_cast<double>(metrics::audit_safety(t, t.scenario.finality()).size());
         }},
        {"liveness_faults",
         [](const sim::Trace& t) { return static_cast<double>(metrics::audit_liveness(t, 60).size()); }},
    };
    return registry;
}

std::string registry_listing(const std::map<std::string, MeasureFn>& reg) {
    std::string out;
    for (const auto& [name, fn] : reg) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

// --- trace-or-state input for `metrics` / `report` ---------------------------

struct LoadedInput {
    bool is_trace = false;
    sim::Trace trace;  // reproduced from the embedded (scenario, seed)
    json state;
    std::string path;
};

LoadedInput load_input(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(errc::config_invalid, "cannot open '" + path + "'");
    std::string first_line;
    std::getline(f, first_line);
    json j;
    try {
        j = json::parse(first_line);
    } catch (const std::exception&) {
        f.seekg(0);  // state files may be pretty-printed over multiple lines
        try {
            f >> j;
        } catch (const std::exception& e) {
            throw Error(errc::config_invalid, "cannot parse '" + path + "': " + e.what());
        }
    }
    LoadedInput in;
    in.path = path;
    if (j.value("schema", "") == std::string(sim::kTraceSchema)) {
        const auto header = sim::Trace::read_header(path);
        in.is_trace = true;
        in.trace = sim::run_scenario(header.scenario, header.seed);
    } else {
        in.state = j;
    }
    return in;
}

int cmd_metrics(const std::vector<std::string>& metric_names, const std::vector<std::string>& files,
                const std::vector<double>& weights, double threshold, double bound, double total,
                const std::string& out_dir) {
    std::vector<metrics::ReportRow> rows;
    static const std::vector<std::string> known = {
        "all",      "hhi",      "forks",      "overturns",          "orphans",     "safety",
        "liveness", "fairness", "throughput", "message_complexity", "persistence", "pivotality",
        "utility"};
    for (const auto& name : metric_names) {
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            std::ostringstream msg;
            msg << "unknown metric '" << name << "'; available:";
            for (const auto& k : known) msg << ' ' << k;
            throw Error(errc::config_invalid, msg.str());
        }
    }

    for (const auto& name : metric_names) {
        if (name == "pivotality") {
            if (weights.empty())
                throw Error(errc::config_invalid, "pivotality needs --weights and --threshold");
            const auto counts = metrics::pivotality(weights, threshold);
            for (std::size_t i = 0; i < counts.size(); ++i)
                rows.push_back({"pivotality", "node_" + std::to_string(i), static_cast<double>(counts[i]),
                                "coalitions", "-", 0});
            continue;
        }
        if (name == "hhi" && !weights.empty()) {
            rows.push_back({"hhi", "weights", metrics::hhi(weights, total), "points", "-", 0});
            continue;
        }
        for (const auto& file : files) {
            LoadedInput in = load_input(file);
            if (!in.is_trace) {
                // state file: resource amounts with an optional explicit total
                if (name == "hhi" || name == "all") {
                    const auto amounts = in.state.at("amounts").get<std::vector<double>>();
                    const double total = in.state.value("total", -1.0);
                    rows.push_back({"hhi", in.path, metrics::hhi(amounts, total), "points",
                                    in.state.value("name", "state"), 0});
                }
                continue;
            }
            const auto& tr = in.trace;
            if (name == "all") {
                auto sub = metrics::standard_report(tr, bound);
                rows.insert(rows.end(), sub.begin(), sub.end());
                continue;
            }
            auto add = [&](const std::string& detail, double v, const std::string& unit) {
                rows.push_back({name, detail, v, unit, tr.scenario_digest, tr.seed});
            };
            if (name == "hhi") {
                const auto& kind = tr.scenario.resource_kinds[tr.scenario.consensus_resource];
                add(kind, metrics::hhi(tr, kind), "points");
            } else if (name == "forks") {
                const auto forks = metrics::detect_forks(tr);
                add("count", static_cast<double>(forks.size()), "intervals");
                for (std::size_t i = 0; i < forks.size(); ++i) {
                    add("interval_" + std::to_string(i) + "_start", forks[i].start, "s");
                    add("interval_" + std::to_string(i) + "_end", forks[i].end, "s");
                }
            } else if (name == "overturns") {
                const auto ov = metrics::detect_overturns(tr);
                add("count", static_cast<double>(ov.size()), "events");
                for (const auto& o : ov)
                    add("block_" + std::to_string(o.block) + "_node_" + std::to_string(o.node), o.time, "s");
            } else if (name == "orphans") {
                add("count", static_cast<double>(metrics::detect_orphans(tr).size()), "blocks");
            } else if (name == "safety") {
                add("violations",
                    static_cast<double>(metrics::audit_safety(tr, tr.scenario.finality()).size()), "events");
            } else if (name == "liveness") {
                add("faults", static_cast<double>(metrics::audit_liveness(tr, bound).size()), "events");
            } else if (name == "fairness") {
                const auto fr = metrics::fairness_measure(tr, tr.scenario.utility);
                add("epsilon_max", fr.epsilon, "fraction");
                for (NodeId n = 0; n < tr.scenario.n_nodes; ++n)
                    add("share_node_" + std::to_string(n), fr.shares[n], "fraction");
            } else if (name == "throughput") {
                add("finalized", metrics::throughput(tr), "tx/s");
            } else if (name == "message_complexity") {
                const auto mc = metrics::message_complexity(tr);
                add("per_decision", mc.total, "messages");
                add("proposals", mc.proposals, "messages");
                add("prepares", mc.prepares, "messages");
                add("commits", mc.commits, "messages");
                add("block_msgs_per_block", mc.block_msgs_per_block, "messages");
            } else if (name == "persistence") {
                const auto prop = metrics::heads_consistent_property();
                const auto w =
                    metrics::persistence_check(tr, prop, 0, tr.horizon * 0.1, metrics::PersistenceMode::Weak);
                const auto s = metrics::persistence_check(tr, prop, 0, tr.horizon * 0.1,
                                                          metrics::PersistenceMode::Strong);
                add("heads_consistent_weak", w == metrics::PersistenceVerdict::Holds ? 1 : 0, "verdict");
                add("heads_consistent_strong", s == metrics::PersistenceVerdict::Holds ? 1 : 0, "verdict");
            } else if (name == "utility") {
                for (NodeId n = 0; n < tr.scenario.n_nodes; ++n)
                    add("node_" + std::to_string(n), strategy::estimate_utility(tr, n, tr.scenario.utility),
                        "tokens/s");
            }
        }
    }
    const std::string csv = metrics::to_csv(rows);
    if (out_dir.empty()) {
        std::cout << csv;
    } else {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "metrics.csv", csv);
        std::cout << "wrote " << (fs::path(out_dir) / "metrics.csv").string() << " (" << rows.size()
                  << " rows)\n";
    }
    return 0;
}

int cmd_run(const std::string& config_path, std::uint64_t seed, unsigned n_seeds, double horizon_override,
            const std::string& out_dir) {
    sim::ScenarioConfig cfg = sim::ScenarioConfig::load_file(config_path);
    if (horizon_override >= 0) {
        cfg.horizon = horizon_override;
        cfg.validate();
    }
    const fs::path out = out_dir.empty() ? "." : out_dir;
    fs::create_directories(out);

    struct RunResult {
        std::uint64_t seed = 0;
        std::uint64_t checksum = 0;
        std::size_t events = 0;
        std::size_t blocks = 0;
        std::string file;
    };
    std::vector<RunResult> results(n_seeds);
    std::vector<std::function<void()>> jobs;
    for (unsigned i = 0; i < n_seeds; ++i) {
        jobs.push_back([&, i] {
            const std::uint64_t s = seed + i;
            const sim::Trace trace = sim::run_scenario(cfg, s);
            const fs::path file = out / (cfg.name + "-seed" + std::to_string(s) + ".trace");
            trace.write_file(file.string());
            results[i] = {s, trace.checksum(), trace.events.size(), trace.dag.size(), file.string()};
        });
    }
    run_parallel(jobs);

    json summary;
    summary["scenario"] = cfg.name;
    summary["digest"] = cfg.digest();
    summary["horizon"] = cfg.horizon;
    json runs = json::array();
    for (const auto& r : results)
        runs.push_back({{"seed", r.seed},
                        {"checksum", to_hex(r.checksum)},
                        {"events", r.events},
                        {"blocks", r.blocks},
                        {"trace", r.file}});
    summary["runs"] = runs;
    write_text(out / (cfg.name + "-summary.json"), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::vector<double>& values,
              std::uint64_t seed, unsigned n_seeds, const std::vector<std::string>& metric_names,
              const std::string& out_dir) {
    if (values.size() < 2) throw Error(errc::config_invalid, "sweep needs at least 2 axis values");
    const auto& registry = measure_registry();
    const std::vector<std::string> names =
        metric_names.empty() ? std::vector<std::string>{"throughput"} : metric_names;
    for (const auto& name : names)
        if (!registry.count(name))
            throw Error(errc::config_invalid,
                        "unknown metric '" + name + "'; available: " + registry_listing(registry));

    const sim::ScenarioConfig base = sim::ScenarioConfig::load_file(config_path);
    (void)analysis::apply_axis(base, axis, values.front());  // fail fast on a bad axis

    struct Cell {
        double value = 0;
        std::uint64_t seed = 0;
        std::vector<double> measures;
    };
    std::vector<Cell> cells(values.size() * n_seeds);
    std::vector<std::function<void()>> jobs;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        for (unsigned si = 0; si < n_seeds; ++si) {
            jobs.push_back([&, vi, si] {
                const sim::ScenarioConfig cfg = analysis::apply_axis(base, axis, values[vi]);
                const sim::Trace trace = sim::run_scenario(cfg, seed + si);
                Cell& cell = cells[vi * n_seeds + si];
                cell.value = values[vi];
                cell.seed = seed + si;
                for (const auto& name : names) cell.measures.push_back(registry.at(name)(trace));
            });
        }
    }
    run_parallel(jobs);

    std::ostringstream csv;
    csv.precision(17);
    csv << "axis,value,seed";
    for (const auto& name : names) csv << ',' << name;
    csv << ",scenario\n";
    const std::string digest = base.digest();
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        for (unsigned si = 0; si < n_seeds; ++si) {
            const Cell& cell = cells[vi * n_seeds + si];
            csv << axis << ',' << cell.value << ',' << cell.seed;
            for (double m : cell.measures) csv << ',' << m;
            csv << ',' << digest << '\n';
        }
        for (std::size_t mi = 0; mi < names.size(); ++mi) {
            std::vector<double> xs;
            for (unsigned si = 0; si < n_seeds; ++si) xs.push_back(cells[vi * n_seeds + si].measures[mi]);
            csv << axis << ',' << values[vi] << ",aggregate," << stats::mean(xs) << ','
                << stats::std_error(xs) << ',' << names[mi] << '\n';
        }
    }
    if (out_dir.empty()) {
        std::cout << csv.str();
    } else {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "sweep.csv", csv.str());
        std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << '\n';
    }
    return 0;
}

int cmd_replay(const std::string& trace_path) {
    const auto header = sim::Trace::read_header(trace_path);
    const sim::Trace rerun = sim::run_scenario(header.scenario, header.seed);
    const std::uint64_t expect = fnv1a(rerun.serialize());
    if (expect != header.checksum) {
        std::cout << "mismatch: recorded " << to_hex(header.checksum) << " recomputed " << to_hex(expect)
                  << '\n';
        return 4;
    }
    std::cout << "ok: " << to_hex(expect) << '\n';
    return 0;
}

int cmd_report(const std::vector<std::string>& files, double bound, const std::string& out_dir) {
    std::vector<metrics::ReportRow> rows;
    json summary = json::array();
    for (const auto& file : files) {
        LoadedInput in = load_input(file);
        if (!in.is_trace) continue;
        auto sub = metrics::standard_report(in.trace, bound);
        rows.insert(rows.end(), sub.begin(), sub.end());
        json s;
        s["trace"] = file;
        s["scenario"] = in.trace.scenario.name;
        s["digest"] = in.trace.scenario_digest;
        s["seed"] = in.trace.seed;
        s["events"] = in.trace.events.size();
        s["blocks"] = in.trace.dag.size();
        summary.push_back(std::move(s));
    }
    const std::string csv = metrics::to_csv(rows);
    if (out_dir.empty()) {
        std::cout << csv;
    } else {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "report.csv", csv);
        write_text(fs::path(out_dir) / "report-summary.json", summary.dump(2) + "\n");
        std::cout << "wrote " << (fs::path(out_dir) / "report.csv").string() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"presto-sim: deterministic consensus-protocol simulator and metrics engine"};
    app.require_subcommand(1);

    std::string config_path, out_dir, axis, trace_path;
    std::uint64_t seed = 1;
    unsigned n_seeds = 1;
    double horizon_override = -1, threshold = 0.51, bound = 60, total = -1;
    std::vector<double> values, weights;
    std::vector<std::string> metric_names, files;

    auto* run = app.add_subcommand("run", "simulate a scenario and write its trace");
    run->add_option("--config", config_path, "scenario config (JSON)")->required();
    run->add_option("--seed", seed, "base RNG seed");
    run->add_option("--seeds", n_seeds, "number of consecutive seeds to run");
    run->add_option("--horizon", horizon_override, "override the scenario horizon (seconds)");
    run->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "run a scenario family over an axis and tabulate metrics");
    sweep->add_option("--config", config_path, "scenario config (JSON)")->required();
    sweep->add_option("--axis", axis, "JSON pointer into the scenario, e.g. /ibft/k")->required();
    sweep->add_option("--values", values, "axis values")->required()->delimiter(',')->allow_extra_args(false);
    sweep->add_option("--seed", seed, "base RNG seed");
    sweep->add_option("--seeds", n_seeds, "seeds per axis value");
    sweep->add_option("--metric", metric_names, "metric name (repeatable)")->allow_extra_args(false);
    sweep->add_option("--out", out_dir, "output directory");

    auto* met = app.add_subcommand("metrics", "compute metrics from trace or state files");
    met->add_option("--metric", metric_names, "metric name (repeatable)")->required()->allow_extra_args(false);
    met->add_option("files", files, "trace/state files");
    met->add_option("--weights", weights, "explicit shares for pivotality/hhi")->delimiter(',')->allow_extra_args(false);
    met->add_option("--threshold", threshold, "pivotality winning threshold");
    met->add_option("--total", total, "explicit resource total for --weights hhi");
    met->add_option("--bound", bound, "liveness bound (seconds)");
    met->add_option("--out", out_dir, "output directory");

    auto* replay = app.add_subcommand("replay", "re-run a trace and verify its checksum");
    replay->add_option("trace", trace_path, "trace file")->required();

    auto* report = app.add_subcommand("report", "full metric report over trace files");
    report->add_option("files", files, "trace files")->required();
    report->add_option("--bound", bound, "liveness bound (seconds)");
    report->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(run)) return cmd_run(config_path, seed, n_seeds, horizon_override, out_dir);
        if (app.got_subcommand(sweep))
            return cmd_sweep(config_path, axis, values, seed, n_seeds, metric_names, out_dir);
        if (app.got_subcommand(met))
            return cmd_metrics(metric_names, files, weights, threshold, bound, total, out_dir);
        if (app.got_subcommand(replay)) return cmd_replay(trace_path);
        if (app.got_subcommand(report)) return cmd_report(files, bound, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == errc::config_invalid ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
