#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "presto/engine.hpp"
#include "presto/metrics.hpp"
#include "presto/utility.hpp"

using namespace presto;
using sim::Event;
using sim::EventKind;
using sim::EventQueue;
using sim::ScriptedEvent;

TEST_CASE("event queue: fifo in time, seq tiebreak, no scheduling into the past") {
    EventQueue q;
    Event a;
    a.time = 5;
    a.seq = 5;
    q.schedule(a, 0);
    CHECK(q.pop().seq == 5);

    Event b1, b2;
    b1.time = b2.time = 3;
    b1.seq = 5;
    b2.seq = 9;
    q.schedule(b2, 0);
    q.schedule(b1, 0);
    CHECK(q.pop().seq == 5);
    CHECK(q.pop().seq == 9);

    Event past;
    past.time = 1;
    CHECK_THROWS_AS(q.schedule(past, 2.0), Error);
}

TEST_CASE("deliver: latency walk along a line, re-gossip on first receipt") {
    // line 0-1-2, deterministic latency 10s, node0 publishes at t=0
    auto cfg = testing::nakamoto_scenario({1, 1, 1}, 600, 10, 100);
    cfg.topology = sim::line_topology(3, {sim::LatencyModel::Kind::Deterministic, 10});
    cfg.scripted_only = true;
    cfg.script.push_back({ScriptedEvent::Kind::MineBlock, 0, 0, std::nullopt, true, -1, 0});

    const auto trace = sim::run_scenario(cfg, 1);
    std::vector<std::pair<double, int>> arrivals;  // (t, node) for effective arrivals
    for (const auto& e : trace.events)
        if (e.kind == EventKind::BlockArrival && !(e.flags & sim::TraceEvent::kDuplicate))
            arrivals.emplace_back(e.t, e.node);
    REQUIRE(arrivals.size() == 2);
    CHECK(arrivals[0] == std::pair<double, int>{10, 1});
    CHECK(arrivals[1] == std::pair<double, int>{20, 2});
}

TEST_CASE("deliver: severed edge drops, second receipt is a no-op") {
    auto cfg = testing::nakamoto_scenario({1, 1, 1}, 600, 5, 100);
    cfg.scripted_only = true;
    cfg.script.push_back({ScriptedEvent::Kind::MineBlock, 0, 0, std::nullopt, true, -1, 0});
    cfg.topology.partitions.push_back({0, 100, {{0, 1}}});

    const auto trace = sim::run_scenario(cfg, 1);
    int applied_n1 = 0, dropped_n1 = 0, dup = 0;
    for (const auto& e : trace.events) {
        if (e.kind != EventKind::BlockArrival) continue;
        if (e.node == 1 && (e.flags & sim::TraceEvent::kDropped)) ++dropped_n1;
        if (e.node == 1 && !(e.flags & (sim::TraceEvent::kDropped | sim::TraceEvent::kDuplicate)))
            ++applied_n1;
        if (e.flags & sim::TraceEvent::kDuplicate) ++dup;
    }
    CHECK(dropped_n1 == 1);   // direct edge severed
    CHECK(applied_n1 == 1);   // reached via node 2's re-gossip
    CHECK(dup >= 1);          // flooding produces deduplicated duplicates
}

TEST_CASE("resource_fraction and alpha_strong") {
    std::vector<sim::ResourceVector> nodes = {{{3.0}}, {{1.0}}};
    CHECK(sim::resource_fraction(nodes, 0, 0) == doctest::Approx(0.75));
    CHECK(sim::resource_fraction(nodes, 1, 0) == doctest::Approx(0.25));

    std::vector<sim::ResourceVector> solo = {{{5.0}}};
    CHECK(sim::resource_fraction(solo, 0, 0) == doctest::Approx(1.0));

    std::vector<sim::ResourceVector> zero = {{{0.0}}, {{0.0}}};
    CHECK_THROWS_AS(sim::resource_fraction(zero, 0, 0), Error);

    std::vector<sim::ResourceVector> paradox = {{{0.45}}, {{0.40}}, {{0.15}}};
    CHECK(sim::alpha_strong(paradox, {0, 1, 2}, 0, 1.0));          // full set is 1-strong
    CHECK(sim::alpha_strong(paradox, {0, 2}, 0, 0.51));            // 0.60 >= 0.51
    CHECK_FALSE(sim::alpha_strong(paradox, {2}, 0, 0.51));
    CHECK(sim::alpha_strong(paradox, {}, 0, 0.0));                 // empty group, alpha 0
    CHECK_FALSE(sim::alpha_strong(paradox, {}, 0, 0.1));
    CHECK_THROWS_AS(sim::alpha_strong(paradox, {0}, 0, 1.5), Error);

    // fractions over active nodes sum to 1
    Rng rng(11, "fractions");
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<sim::ResourceVector> rs;
        const std::size_t n = 2 + rng.below(6);
        for (std::size_t i = 0; i < n; ++i) rs.push_back({{rng.uniform(0.01, 5.0)}});
        double sum = 0;
        for (NodeId i = 0; i < n; ++i) sum += sim::resource_fraction(rs, i, 0);
        CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("snapshot: t=0 views are {genesis}; same state gives same digest") {
    auto cfg = testing::nakamoto_scenario({1, 1}, 100, 1, 50);
    const auto t1 = sim::run_scenario(cfg, 3);
    const auto t2 = sim::run_scenario(cfg, 3);
    REQUIRE(!t1.snapshots.empty());
    for (const auto& node : t1.snapshots.front().nodes) {
        CHECK(node.view == std::vector<BlockId>{kGenesisId});
        CHECK(node.head == kGenesisId);
    }
    REQUIRE(t1.snapshots.size() == t2.snapshots.size());
    for (std::size_t i = 0; i < t1.snapshots.size(); ++i)
        CHECK(t1.snapshots[i].digest == t2.snapshots[i].digest);
}

TEST_CASE("run: horizon 0 leaves only the initial snapshot") {
    auto cfg = testing::nakamoto_scenario({1, 1}, 100, 1, 0);
    const auto trace = sim::run_scenario(cfg, 1);
    REQUIRE(trace.events.size() == 1);
    CHECK(trace.events[0].kind == EventKind::Snapshot);
    CHECK(trace.dag.size() == 1);
}

TEST_CASE("run: identical (scenario, seed) reproduces byte-identical traces") {
    auto cfg = testing::nakamoto_scenario({0.6, 0.4}, 50, 2, 2000);
    cfg.workload.tx_rates = {0.1, 0.1};
    const auto a = sim::run_scenario(cfg, 42);
    const auto b = sim::run_scenario(cfg, 42);
    CHECK(a.serialize() == b.serialize());
    const auto c = sim::run_scenario(cfg, 43);
    CHECK(a.checksum() != c.checksum());
}

TEST_CASE("views grow monotonically and heads stay inside them") {
    auto cfg = testing::nakamoto_scenario({0.5, 0.3, 0.2}, 30, 3, 3000);
    cfg.snapshot_times = {750, 1500, 2250};
    const auto trace = sim::run_scenario(cfg, 9);
    REQUIRE(trace.snapshots.size() == 4);  // initial + 3 scheduled
    for (std::size_t i = 0; i + 1 < trace.snapshots.size(); ++i) {
        for (NodeId n = 0; n < 3; ++n) {
            const auto& earlier = trace.snapshots[i].nodes[n].view;
            const auto& later = trace.snapshots[i + 1].nodes[n].view;
            CHECK(std::includes(later.begin(), later.end(), earlier.begin(), earlier.end()));
            const auto& head = trace.snapshots[i + 1].nodes[n].head;
            CHECK(std::binary_search(later.begin(), later.end(), head));
        }
    }
}

TEST_CASE("orphan-pending buffer applies out-of-order arrivals in order") {
    // node 1 publishes two withheld blocks at once: the child can overtake
    // its parent in the queue only if buffering is broken
    auto cfg = testing::nakamoto_scenario({1, 1}, 600, 4, 100);
    cfg.scripted_only = true;
    cfg.script.push_back({ScriptedEvent::Kind::MineBlock, 1, 1, std::nullopt, false, -1, 0});
    cfg.script.push_back({ScriptedEvent::Kind::MineBlock, 2, 1, std::nullopt, false, -1, 0});
    cfg.script.push_back({ScriptedEvent::Kind::PublishWithheld, 5, 1, std::nullopt, true, -1, 0});
    const auto trace = sim::run_scenario(cfg, 1);
    CHECK(trace.final_state.nodes[0].head == 2);
    CHECK(trace.final_state.nodes[0].view == std::vector<BlockId>{0, 1, 2});
}

TEST_CASE("eventual consistency: equal views imply equally heavy heads") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        auto cfg = testing::nakamoto_scenario({0.4, 0.3, 0.3}, 40, 0.5, 4000);
        const auto trace = sim::run_scenario(cfg, seed);
        const auto& fin = trace.final_state;
        for (NodeId a = 0; a < 3; ++a)
            for (NodeId b = a + 1; b < 3; ++b)
                if (fin.nodes[a].view == fin.nodes[b].view)
                    CHECK(trace.dag.cumulative_work(fin.nodes[a].head) ==
                          doctest::Approx(trace.dag.cumulative_work(fin.nodes[b].head)));
    }
}

TEST_CASE("partition heal exchanges view diffs") {
    auto cfg = testing::nakamoto_scenario({1, 1}, 600, 1, 100);
    cfg.scripted_only = true;
    // node 0 mines during the partition; node 1 learns of it only at heal time
    cfg.topology.partitions.push_back({5, 50, {{0, 1}}});
    cfg.script.push_back({ScriptedEvent::Kind::MineBlock, 10, 0, std::nullopt, true, -1, 0});
    const auto trace = sim::run_scenario(cfg, 1);
    bool heal_arrival = false;
    for (const auto& e : trace.events)
        if (e.kind == EventKind::BlockArrival && (e.flags & sim::TraceEvent::kHeal) &&
            !(e.flags & sim::TraceEvent::kDropped))
            heal_arrival = true;
    CHECK(heal_arrival);
    CHECK(trace.final_state.nodes[1].head == 1);
}

TEST_CASE("scenario config validation rejects bad shapes") {
    auto cfg = testing::nakamoto_scenario({1, 1}, 100, 1, 100);
    cfg.n_nodes = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);

    cfg = testing::nakamoto_scenario({1, 1}, 100, 1, 100);
    cfg.strategies[0] = "mystery";
    CHECK_THROWS_AS(cfg.validate(), Error);

    cfg = testing::nakamoto_scenario({1, 1}, 100, 1, 100);
    cfg.topology.edges.clear();
    CHECK_THROWS_AS(cfg.validate(), Error);  // disconnected

    auto ibft = testing::ibft_scenario(4, 4, 0.1, 10, 100);
    ibft.ibft.quorum = 9;
    CHECK_THROWS_AS(ibft.validate(), Error);
}

TEST_CASE("transactions return to the mempool when their block is overturned") {
    using K = ScriptedEvent::Kind;
    auto cfg = testing::nakamoto_scenario({1, 1}, 600, 0.5, 100);
    cfg.scripted_only = true;
    cfg.script.push_back({K::CreateTx, 1, 0, std::nullopt, true, -1, 1.0});
    cfg.script.push_back({K::MineBlock, 2, 0, std::nullopt, true, -1, 0});   // id 1 includes the tx
    cfg.script.push_back({K::MineBlock, 3, 1, BlockId{0}, false, -1, 0});    // fork below it: id 2
    cfg.script.push_back({K::MineBlock, 4, 1, BlockId{2}, false, -1, 0});    // id 3
    cfg.script.push_back({K::PublishWithheld, 5, 1, std::nullopt, true, -1, 0});
    cfg.script.push_back({K::MineBlock, 10, 0, std::nullopt, true, -1, 0});  // id 4, on the new head

    const auto trace = sim::run_scenario(cfg, 1);
    REQUIRE(trace.dag.at(1).txs == std::vector<TxId>{0});
    CHECK(trace.final_state.nodes[0].head == 4);
    CHECK(*trace.dag.at(4).parent == 3);
    CHECK(trace.dag.at(4).txs == std::vector<TxId>{0});  // re-included after the overturn
}

TEST_CASE("fixed fee policy credits the flat reward only") {
    using K = ScriptedEvent::Kind;
    auto cfg = testing::nakamoto_scenario({1}, 600, 0, 100);
    cfg.scripted_only = true;
    cfg.nakamoto.confirmations = 1;
    cfg.script.push_back({K::CreateTx, 1, 0, std::nullopt, true, -1, 5.0});
    cfg.script.push_back({K::MineBlock, 2, 0, std::nullopt, true, -1, 0});
    cfg.script.push_back({K::MineBlock, 3, 0, std::nullopt, true, -1, 0});
    const auto per_tx = sim::run_scenario(cfg, 1);
    CHECK(strategy::finalized_rewards(per_tx, cfg.utility).total == doctest::Approx(6.0));

    cfg.nakamoto.fixed_fee_policy = true;
    const auto fixed = sim::run_scenario(cfg, 1);
    CHECK(strategy::finalized_rewards(fixed, cfg.utility).total == doctest::Approx(1.0));
}

TEST_CASE("ibft observers follow the finalized chain via gossip") {
    const auto cfg =
        sim::ScenarioConfig::load_file(std::string(PRESTO_CONFIG_DIR) + "/ibft_k4.json");
    auto shorter = cfg;
    shorter.horizon = 30;
    const auto trace = sim::run_scenario(shorter, 2);
    // node 4 holds no key yet tracks the validators' finalized chain
    CHECK(trace.dag.height(trace.final_state.nodes[4].head) > 10);
    for (BlockId b : trace.dag.chain_of(trace.final_state.nodes[4].head))
        if (b != kGenesisId) CHECK(trace.dag.at(b).payload.commit_keys.size() >= 3);
}

TEST_CASE("periodic snapshots and uniform tie-breaking stay deterministic") {
    auto cfg = testing::nakamoto_scenario({0.5, 0.5}, 4, 3, 800);  // forky: latency ~ interval
    cfg.nakamoto.tiebreak = protocol::Tiebreak::Uniform;
    cfg.snapshot_every = 100;
    const auto a = sim::run_scenario(cfg, 14);
    const auto b = sim::run_scenario(cfg, 14);
    CHECK(a.serialize() == b.serialize());
    CHECK(a.snapshots.size() == 9);  // initial + 8 periodic
    for (std::size_t i = 1; i < a.snapshots.size(); ++i)
        CHECK(a.snapshots[i].time == doctest::Approx(100.0 * i));
}
