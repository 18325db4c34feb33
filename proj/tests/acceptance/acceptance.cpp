// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.
//
// Acceptance suite: nine end-to-end criteria, one pass/fail line each.
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "presto/analysis.hpp"
#include "presto/engine.hpp"
#include "presto/metrics.hpp"
#include "presto/stats.hpp"
#include "presto/utility.hpp"

using namespace presto;

namespace {

const std::string kConfigs = PRESTO_CONFIG_DIR;

struct Checker {
    bool ok = true;
    std::ostringstream log;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "    FAILED: " << what << "\n";
        }
    }
    void note(const std::string& what) { log << "    " << what << "\n"; }
};

sim::ScenarioConfig nakamoto_two(double p0, double mean_interval, double horizon) {
    sim::ScenarioConfig cfg;
    cfg.name = "acc-nakamoto";
    cfg.protocol = protocol::ProtocolKind::Nakamoto;
    cfg.nakamoto.mean_block_interval = mean_interval;
    cfg.n_nodes = 2;
    cfg.resource_kinds = {"hashpower"};
    cfg.node_resources = {{{p0}}, {{1.0 - p0}}};
    cfg.topology = sim::complete_topology(2, {sim::LatencyModel::Kind::Deterministic, 0});
    cfg.horizon = horizon;
    return cfg;
}

sim::ScenarioConfig ibft(std::uint32_t k, double latency, double timeout, double horizon) {
    sim::ScenarioConfig cfg;
    cfg.name = "acc-ibft";
    cfg.protocol = protocol::ProtocolKind::Ibft;
    cfg.ibft.k = k;
    cfg.ibft.round_timeout = timeout;
    cfg.n_nodes = k;
    for (KeyIndex i = 0; i < k; ++i) cfg.ibft.key_holder.push_back(i);
    cfg.resource_kinds = {"authority"};
    cfg.node_resources.assign(k, {{1.0}});
    cfg.topology = sim::complete_topology(k, {sim::LatencyModel::Kind::Deterministic, latency});
    cfg.horizon = horizon;
    return cfg;
}

// Independent selfish-mining oracle: the literature's lead-state Markov chain
// solved numerically, never touching the simulator.
double selfish_oracle_share(double alpha) {
    const double a = alpha, b = 1 - alpha;
    const int max_lead = 300, n = max_lead + 2;
    struct T {
        double p;
        int next;
        double att, hon;
    };
    auto lead = [&](int l) { return 1 + l; };
    std::vector<std::vector<T>> trans(n);
    trans[0] = {{a, lead(1), 0, 0}, {b, 0, 0, 1}};
    trans[1] = {{a, 0, 2, 0}, {b, 0, 0, 2}};  // tie race with gamma = 0
    trans[lead(1)] = {{a, lead(2), 0, 0}, {b, 1, 0, 0}};
    trans[lead(2)] = {{a, lead(3), 0, 0}, {b, 0, 2, 0}};
    for (int l = 3; l < max_lead; ++l)
        trans[lead(l)] = {{a, lead(l + 1), 0, 0}, {b, lead(l - 1), 1, 0}};
    trans[lead(max_lead)] = {{a, lead(max_lead), 1, 0}, {b, lead(max_lead - 1), 1, 0}};

    std::vector<double> pi(n, 0.0), next(n);
    pi[0] = 1;
    for (int iter = 0; iter < 100000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s < n; ++s)
            for (const auto& t : trans[s]) next[t.next] += pi[s] * t.p;
        double diff = 0;
        for (int s = 0; s < n; ++s) diff += std::abs(next[s] - pi[s]);
        pi.swap(next);
        if (diff < 1e-14) break;
    }
    double att = 0, hon = 0;
    for (int s = 0; s < n; ++s)
        for (const auto& t : trans[s]) {
            att += pi[s] * t.p * t.att;
            hon += pi[s] * t.p * t.hon;
        }
    return att / (att + hon);
}

double withholding_closed_form(double alpha) {
    const double a = alpha;
    return (4 * a * a * (1 - a) * (1 - a) - a * a * a) / (1 - a * (1 + (2 - a) * a));
}

// --- criteria ---------------------------------------------------------------

void criterion_1_hhi(Checker& c) {
    const std::vector<double> bitcoin = {20.1, 14.5, 13.1, 8.8, 8.8, 8.3, 6.1, 4.9, 1.7, 1.4};
    const std::vector<double> ethereum = {26.5, 24.5, 11.8, 11.2, 5.4, 2.3, 1.7, 1.7, 1.3, 1.2};
    const double hb = metrics::hhi(bitcoin, 100);
    const double he = metrics::hhi(ethereum, 100);
    c.note("bitcoin HHI = " + std::to_string(hb) + ", ethereum HHI = " + std::to_string(he));
    c.expect(std::abs(hb - 1075.7) <= 0.1, "bitcoin HHI within 1075.7 +/- 0.1");
    c.expect(std::abs(he - 1610.5) <= 0.1, "ethereum HHI within 1610.5 +/- 0.1");
}

void criterion_2_golden_trace(Checker& c) {
    const auto cfg = sim::ScenarioConfig::load_file(kConfigs + "/golden_fork.json");
    const auto t1 = sim::run_scenario(cfg, 1);
    const auto t2 = sim::run_scenario(cfg, 1);
    c.expect(t1.serialize() == t2.serialize(), "replay is byte-identical across two runs");

    const auto forks = metrics::detect_forks(t1);
    c.expect(forks.size() == 1, "exactly one network fork");
    if (forks.size() == 1) {
        c.note("fork interval [" + std::to_string(forks[0].start) + ", " + std::to_string(forks[0].end) +
               "]");
        c.expect(forks[0].start == 241.0 && forks[0].end == 710.0, "fork spans exactly [241, 710]");
        c.expect(!forks[0].open, "fork resolves before the horizon");
    }
    const auto ov = metrics::detect_overturns(t1);
    c.expect(ov.size() == 2, "exactly two overturn events");
    if (ov.size() == 2) {
        c.expect(ov[0].block == 3 && ov[0].node == 1 && ov[0].time == 702.0,
                 "B3 overturned by the second node at t=702");
        c.expect(ov[1].block == 3 && ov[1].node == 2 && ov[1].time == 710.0,
                 "B3 overturned by the third node at t=710");
    }
}

void criterion_3_voting_paradox(Checker& c) {
    const std::vector<double> weights = {0.45, 0.40, 0.15};
    const auto counts = metrics::pivotality(weights, 0.51);
    c.expect(counts == std::vector<std::uint64_t>{2, 2, 2}, "pivot counts are (2, 2, 2)");

    // independent oracle: explicit enumeration of all 8 coalitions
    std::vector<std::uint64_t> expect(3, 0);
    for (int mask = 0; mask < 8; ++mask) {
        double w = 0;
        for (int i = 0; i < 3; ++i)
            if (mask & (1 << i)) w += weights[i];
        if (w < 0.51) continue;
        for (int i = 0; i < 3; ++i)
            if ((mask & (1 << i)) && (w - weights[i]) < 0.51) expect[i] += 1;
    }
    c.note("enumerated counts: (" + std::to_string(expect[0]) + ", " + std::to_string(expect[1]) + ", " +
           std::to_string(expect[2]) + ")");
    c.expect(counts == expect, "matches the exhaustive 8-coalition enumeration");
}

void criterion_4_message_complexity(Checker& c) {
    std::vector<double> ks, totals, pods, k2s;
    for (std::uint32_t k : {4u, 7u, 10u}) {
        const auto cfg = ibft(k, 0.01, 20, 30);
        const auto trace = sim::run_scenario(cfg, 1);
        const auto mc = metrics::message_complexity(trace);
        const double exp_prop = k - 1.0;
        const double exp_votes = static_cast<double>(k) * (k - 1.0);
        const double exp_total = exp_prop + 2 * exp_votes;
        std::ostringstream line;
        line << "k=" << k << ": proposals " << mc.proposals << " prepares " << mc.prepares << " commits "
             << mc.commits << " total " << mc.total << " (exact " << exp_total << "), decisions "
             << mc.decisions;
        c.note(line.str());
        c.expect(std::abs(mc.proposals - exp_prop) <= 0.05 * exp_prop, "proposals within 5% of k-1");
        c.expect(std::abs(mc.prepares - exp_votes) <= 0.05 * exp_votes, "prepares within 5% of k(k-1)");
        c.expect(std::abs(mc.commits - exp_votes) <= 0.05 * exp_votes, "commits within 5% of k(k-1)");
        c.expect(std::abs(mc.total - exp_total) <= 0.05 * exp_total,
                 "per-decision messages within 5% of (k-1)+2k(k-1)");
        ks.push_back(k);
        totals.push_back(mc.total);
        k2s.push_back(static_cast<double>(k) * k);
        pods.push_back(metrics::pod(mc.total, k - 1.0, false).ratio);
    }
    const auto quad = stats::proportional_fit(k2s, totals);
    c.note("quadratic fit: total ~ " + std::to_string(quad.coeff) +
           " * k^2, R^2 = " + std::to_string(quad.r2));
    c.expect(quad.r2 > 0.99, "per-decision messages fit c*k^2 with R^2 > 0.99");
    const auto lin = stats::linear_fit(ks, pods);
    c.note("PoD fit: " + std::to_string(lin.slope) + " * k + " + std::to_string(lin.intercept) +
           ", R^2 = " + std::to_string(lin.r2));
    c.expect(lin.r2 > 0.99, "PoD vs the N-1 baseline grows linearly in k (R^2 > 0.99)");
    c.expect(lin.slope > 0, "PoD slope is positive");
}

void criterion_5_selfish_mining(Checker& c) {
    for (double p : {0.1, 0.3, 0.4}) {
        auto cfg = nakamoto_two(p, 1.0, 130000);
        cfg.name = "acc-selfish";
        cfg.strategies[0] = "selfish";
        cfg.observer = 1;
        const auto trace = sim::run_scenario(cfg, 5);
        std::uint64_t mined = 0;
        for (const auto& e : trace.events)
            if (e.kind == sim::EventKind::BlockMined) ++mined;
        const double share = strategy::relative_revenue(trace, 0, cfg.utility);
        const double oracle = selfish_oracle_share(p);
        const double closed = withholding_closed_form(p);
        std::ostringstream line;
        line << "p=" << p << ": simulated " << share << ", oracle " << oracle << ", closed form " << closed
             << ", mined blocks " << mined;
        c.note(line.str());
        c.expect(mined >= 100000, "at least 1e5 blocks mined");
        c.expect(std::abs(oracle - closed) < 1e-6, "numeric chain agrees with the closed form");
        c.expect(std::abs(share - oracle) <= 0.02, "relative revenue within 2% absolute of the oracle");
    }
    const std::uint64_t seeds[] = {5};
    auto weak_cfg = nakamoto_two(0.1, 1.0, 130000);
    weak_cfg.observer = 1;
    const auto weak = analysis::incentive_check(weak_cfg, 0, "selfish", weak_cfg.utility, seeds,
                                                analysis::UtilityBasis::Relative, 0.01);
    c.note("p=0.1 delta = " + std::to_string(weak.delta));
    c.expect(weak.compatible && weak.delta < 0, "incentive-compatible at p = 0.1 (delta < 0)");
    auto strong_cfg = nakamoto_two(0.4, 1.0, 130000);
    strong_cfg.observer = 1;
    const auto rep = analysis::incentive_check(strong_cfg, 0, "selfish", strong_cfg.utility, seeds,
                                               analysis::UtilityBasis::Relative, 0.01);
    c.note("p=0.4 delta = " + std::to_string(rep.delta));
    c.expect(!rep.compatible && rep.delta > 0, "incentive-incompatible at p = 0.4 (delta > 0)");
}

void criterion_6_fairness(Checker& c) {
    int inside = 0;
    for (int s = 1; s <= 20; ++s) {
        auto cfg = nakamoto_two(0.75, 10.0, 100000);  // ~1e4 blocks per seed
        const auto trace = sim::run_scenario(cfg, static_cast<std::uint64_t>(s));
        const auto fr = metrics::fairness_measure(trace, cfg.utility);
        const double n = static_cast<double>(strategy::reference_chain(trace).size());
        const double band = stats::binomial_band_3sigma(0.75, n);
        if (std::abs(fr.shares[0] - 0.75) <= band && std::abs(fr.shares[1] - 0.25) <= band) ++inside;
    }
    c.note(std::to_string(inside) + "/20 seeds inside the binomial 3-sigma band");
    c.expect(inside >= 19, "shares within the band for >= 95% of seeds");
}

void criterion_7_audits(Checker& c) {
    // (a) IBFT k=4 with one crashed key: clean audits on every seed
    int clean = 0;
    for (int s = 1; s <= 20; ++s) {
        auto cfg = ibft(4, 0.05, 10, 300);
        cfg.strategies[0] = "crashed";
        cfg.workload.tx_rates = {0.0, 0.2, 0.2, 0.2};
        const auto trace = sim::run_scenario(cfg, static_cast<std::uint64_t>(s));
        const bool safe = metrics::audit_safety(trace, cfg.finality()).empty();
        const bool live = metrics::audit_liveness(trace, 60).empty();
        if (safe && live) ++clean;
    }
    c.note("(a) " + std::to_string(clean) + "/20 seeds with zero safety and zero liveness faults");
    c.expect(clean == 20, "(a) one crashed key: zero faults on all seeds");

    // (b) two crashed keys: liveness stalls everywhere, safety never breaks
    int stalled = 0, safe_b = 0;
    for (int s = 1; s <= 20; ++s) {
        auto cfg = ibft(4, 0.05, 10, 300);
        cfg.strategies[0] = "crashed";
        cfg.strategies[1] = "crashed";
        cfg.workload.tx_rates = {0.0, 0.0, 0.2, 0.2};
        const auto trace = sim::run_scenario(cfg, static_cast<std::uint64_t>(s));
        bool stall = false;
        for (const auto& f : metrics::audit_liveness(trace, 60))
            if (f.kind == metrics::LivenessFault::Kind::Stall) stall = true;
        if (stall) ++stalled;
        if (metrics::audit_safety(trace, cfg.finality()).empty()) ++safe_b;
    }
    c.note("(b) stalls in " + std::to_string(stalled) + "/20 seeds, safety clean in " +
           std::to_string(safe_b) + "/20");
    c.expect(stalled == 20, "(b) two crashed keys: liveness stall detected in every seed");
    c.expect(safe_b == 20, "(b) two crashed keys: zero safety faults (CAP behavior)");

    // (c) scripted 51% double spend against 6-confirmation finality
    const auto ds = sim::ScenarioConfig::load_file(kConfigs + "/doublespend_51.json");
    const auto attack = sim::run_scenario(ds, 1);
    const auto violations = metrics::audit_safety(attack, ds.finality());
    c.note("(c) safety violations: " + std::to_string(violations.size()));
    c.expect(violations.size() == 1, "(c) exactly one safety violation");
}

void criterion_8_determinism(Checker& c) {
    Rng rng(2026, "acc-random-configs");
    int identical = 0;
    for (int i = 0; i < 50; ++i) {
        sim::ScenarioConfig cfg;
        cfg.name = "acc-rand-" + std::to_string(i);
        const bool use_ibft = rng.bernoulli(0.4);
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.below(4));
        cfg.n_nodes = n;
        const double lat = rng.uniform(0.0, 2.0);
        const bool exp_lat = rng.bernoulli(0.3);
        sim::LatencyModel lm{exp_lat ? sim::LatencyModel::Kind::Exponential
                                     : sim::LatencyModel::Kind::Deterministic,
                             exp_lat ? 0.5 + lat : lat};
        cfg.topology = sim::complete_topology(n, lm);
        if (use_ibft) {
            cfg.protocol = protocol::ProtocolKind::Ibft;
            cfg.ibft.k = n;
            for (KeyIndex k = 0; k < n; ++k) cfg.ibft.key_holder.push_back(k);
            cfg.ibft.round_timeout = 5;
            cfg.resource_kinds = {"authority"};
            cfg.node_resources.assign(n, {{1.0}});
        } else {
            cfg.protocol = protocol::ProtocolKind::Nakamoto;
            cfg.nakamoto.mean_block_interval = rng.uniform(5, 40);
            cfg.nakamoto.max_txs_per_block = 1 + static_cast<std::uint32_t>(rng.below(40));
            cfg.resource_kinds = {"hashpower"};
            for (std::uint32_t j = 0; j < n; ++j) cfg.node_resources.push_back({{rng.uniform(0.1, 2.0)}});
            if (rng.bernoulli(0.3)) cfg.strategies[n - 1] = "withhold";
        }
        if (rng.bernoulli(0.3))
            cfg.topology.partitions.push_back({rng.uniform(10, 50), rng.uniform(60, 150), {{0, 1}}});
        if (rng.bernoulli(0.7)) cfg.workload.tx_rates.assign(n, rng.uniform(0.0, 0.2));
        cfg.horizon = rng.uniform(150, 400);
        cfg.snapshot_times = {cfg.horizon / 2};
        cfg.validate();

        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
        const auto a = sim::run_scenario(cfg, seed);
        const auto b = sim::run_scenario(cfg, seed);
        if (a.serialize() == b.serialize()) ++identical;

        // view/head invariants along the run: snapshots nest, heads resolve
        for (std::size_t si = 0; si + 1 < a.snapshots.size(); ++si) {
            for (NodeId nd = 0; nd < n; ++nd) {
                const auto& early = a.snapshots[si].nodes[nd].view;
                const auto& late = a.snapshots[si + 1].nodes[nd].view;
                c.expect(std::includes(late.begin(), late.end(), early.begin(), early.end()),
                         "views are monotone");
                c.expect(std::binary_search(late.begin(), late.end(), a.snapshots[si + 1].nodes[nd].head),
                         "head stays inside the view");
            }
        }
        for (const auto& node : a.final_state.nodes)
            c.expect(a.dag.contains(node.head), "final heads resolve in the dag");
    }
    c.note(std::to_string(identical) + "/50 random configs replay byte-identically");
    c.expect(identical == 50, "double-run checksum equality on 50 random configs");

    // chain-core invariants on randomized dags (>= 1e4 cases)
    Rng drng(31, "acc-dag");
    std::size_t cases = 0;
    bool all_ok = true;
    for (int iter = 0; iter < 12; ++iter) {
        const std::size_t nblocks = 30 + drng.below(21);
        chain::BlockDag dag;
        chain::Block g;
        g.id = 0;
        dag.add_block(g);
        for (BlockId id = 1; id < nblocks; ++id) {
            chain::Block b;
            b.id = id;
            b.parent = drng.below(id);
            b.work = 0.25 * static_cast<double>(1 + drng.below(8));
            dag.add_block(std::move(b));
        }
        for (BlockId x = 0; x < nblocks; ++x) {
            for (BlockId y = x; y < nblocks; ++y) {
                const bool inc = dag.incompatible(x, y);
                const bool anc = dag.is_ancestor(x, y) || dag.is_ancestor(y, x);
                all_ok &= (inc != anc) && (dag.incompatible(y, x) == inc);
                ++cases;
            }
        }
        for (BlockId x = 1; x < nblocks; ++x)
            all_ok &= std::abs(dag.cumulative_work(x) -
                               (dag.cumulative_work(*dag.at(x).parent) + dag.at(x).work)) < 1e-12;
    }
    c.note(std::to_string(cases) + " randomized dag property cases");
    c.expect(cases >= 10000, "at least 1e4 property-test cases");
    c.expect(all_ok, "dag ancestry/incompatibility/work invariants hold");
}

void criterion_9_persistence(Checker& c) {
    Rng rng(909, "acc-signals");
    int implication_ok = 0;
    const int total = 1000;
    for (int i = 0; i < total; ++i) {
        metrics::BoolSignal sig;
        sig.horizon = 100;
        sig.initial = rng.bernoulli(0.5);
        const int flips = static_cast<int>(rng.below(21));
        std::vector<double> times;
        for (int f = 0; f < flips; ++f) times.push_back(rng.uniform(0.1, 99.9));
        std::sort(times.begin(), times.end());
        bool v = sig.initial;
        for (double t : times) {
            v = !v;
            sig.changes.emplace_back(t, v);
        }
        const double warmup = rng.uniform(0, 20);
        const double margin = rng.uniform(0, 50);
        const auto strong =
            metrics::persistence_check(sig, warmup, margin, metrics::PersistenceMode::Strong);
        const auto weak = metrics::persistence_check(sig, warmup, margin, metrics::PersistenceMode::Weak);
        if (strong != metrics::PersistenceVerdict::Holds || weak == metrics::PersistenceVerdict::Holds)
            ++implication_ok;
    }
    c.note(std::to_string(implication_ok) + "/" + std::to_string(total) + " synthetic traces");
    c.expect(implication_ok == total, "strong => weak on 1000 random synthetic traces");

    const auto cfg = sim::ScenarioConfig::load_file(kConfigs + "/golden_fork.json");
    const auto trace = sim::run_scenario(cfg, 1);
    const auto prop = metrics::heads_consistent_property();
    const auto weak = metrics::persistence_check(trace, prop, 0, 100, metrics::PersistenceMode::Weak);
    const auto strong = metrics::persistence_check(trace, prop, 0, 100, metrics::PersistenceMode::Strong);
    c.expect(weak == metrics::PersistenceVerdict::Holds, "heads-consistent weakly holds on the fork trace");
    c.expect(strong == metrics::PersistenceVerdict::Falsified,
             "heads-consistent strongly falsified on the fork trace");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<void(Checker&)> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "HHI reproduction (pool share tables)", criterion_1_hhi},
        {2, "golden fork trace: interval [241, 710], overturns at 702/710, byte-identical replay",
         criterion_2_golden_trace},
        {3, "voting paradox: pivotality (0.45, 0.40, 0.15) @ 0.51 = (2, 2, 2)", criterion_3_voting_paradox},
        {4, "IBFT message complexity: exact counts, quadratic growth, linear PoD",
         criterion_4_message_complexity},
        {5, "selfish mining: revenue matches the Markov oracle; incentive flips between p=0.1 and p=0.4",
         criterion_5_selfish_mining},
        {6, "fairness: reward shares inside the binomial 3-sigma band", criterion_6_fairness},
        {7, "safety/liveness audits: crash tolerance, CAP stall, scripted 51% reorg", criterion_7_audits},
        {8, "determinism and DAG/view/head invariants on randomized inputs", criterion_8_determinism},
        {9, "persistence checker: strong => weak; golden-trace verdicts", criterion_9_persistence},
    };

    int failures = 0;
    for (const auto& crit : criteria) {
        Checker c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            crit.fn(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.log << "    EXCEPTION: " << e.what() << "\n";
        }
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
                .count();
        std::printf("[%s] criterion %d: %s (%lld ms)\n", c.ok ? "PASS" : "FAIL", crit.id, crit.title,
                    static_cast<long long>(ms));
        std::fputs(c.log.str().c_str(), stdout);
        if (!c.ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
