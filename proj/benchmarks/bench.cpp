// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include <benchmark/benchmark.h>

#include "presto/chain.hpp"
#include "presto/engine.hpp"
#include "presto/event.hpp"
#include "presto/metrics.hpp"
#include "presto/rng.hpp"

using namespace presto;

static void BM_EventQueue(benchmark::State& state) {
    const std::size_t n = state.range(0);
    Rng rng(1, "bench-queue");
    std::vector<double> times(n);
    for (auto& t : times) t = rng.uniform(0, 1e6);
    for (auto _ : state) {
        sim::EventQueue q;
        sim::Event e;
        for (std::size_t i = 0; i < n; ++i) {
            e.time = times[i];
            e.seq = i;
            q.schedule(e, 0);
        }
        while (!q.empty()) benchmark::DoNotOptimize(q.pop());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EventQueue)->Range(1 << 10, 1 << 16);

static chain::BlockDag long_chain(std::size_t n) {
    chain::BlockDag dag;
    chain::Block g;
    g.id = 0;
    dag.add_block(g);
    for (BlockId i = 1; i < n; ++i) {
        chain::Block b;
        b.id = i;
        b.parent = i - 1;
        b.work = 1;
        dag.add_block(std::move(b));
    }
    return dag;
}

static void BM_ChainOf(benchmark::State& state) {
    const auto dag = long_chain(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(dag.chain_of(state.range(0) - 1));
}
BENCHMARK(BM_ChainOf)->Range(1 << 8, 1 << 14);

static void BM_CommonPrefix(benchmark::State& state) {
    // two branches of equal depth off one fork point
    chain::BlockDag dag;
    chain::Block g;
    g.id = 0;
    dag.add_block(g);
    const std::size_t depth = state.range(0);
    BlockId next = 1;
    for (int branch = 0; branch < 2; ++branch) {
        BlockId parent = 0;
        for (std::size_t i = 0; i < depth; ++i) {
            chain::Block b;
            b.id = next++;
            b.parent = parent;
            b.work = 1;
            parent = b.id;
            dag.add_block(std::move(b));
        }
    }
    const BlockId tip_a = depth, tip_b = 2 * depth;
    for (auto _ : state) benchmark::DoNotOptimize(dag.common_prefix(tip_a, tip_b));
}
BENCHMARK(BM_CommonPrefix)->Range(1 << 6, 1 << 12);

static void BM_Hhi(benchmark::State& state) {
    Rng rng(2, "bench-hhi");
    std::vector<double> amounts(state.range(0));
    for (auto& a : amounts) a = rng.uniform(0.1, 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::hhi(amounts));
}
BENCHMARK(BM_Hhi)->Range(8, 1 << 12);

static void BM_Pivotality(benchmark::State& state) {
    Rng rng(3, "bench-banzhaf");
    std::vector<double> w(state.range(0));
    for (auto& x : w) x = rng.uniform(0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::pivotality(w, 0.5));
}
BENCHMARK(BM_Pivotality)->DenseRange(8, 20, 4);

static void BM_NakamotoRun(benchmark::State& state) {
    sim::ScenarioConfig cfg;
    cfg.protocol = protocol::ProtocolKind::Nakamoto;
    cfg.nakamoto.mean_block_interval = 1;
    cfg.n_nodes = 2;
    cfg.resource_kinds = {"hashpower"};
    cfg.node_resources = {{{0.6}}, {{0.4}}};
    cfg.topology = sim::complete_topology(2, {sim::LatencyModel::Kind::Deterministic, 0});
    cfg.horizon = static_cast<double>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(cfg, seed++));
    state.SetItemsProcessed(state.iterations() * state.range(0));  // ~1 block per second
}
BENCHMARK(BM_NakamotoRun)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);

static void BM_IbftRun(benchmark::State& state) {
    const std::uint32_t k = state.range(0);
    sim::ScenarioConfig cfg;
    cfg.protocol = protocol::ProtocolKind::Ibft;
    cfg.ibft.k = k;
    cfg.ibft.round_timeout = 20;
    cfg.n_nodes = k;
    for (KeyIndex i = 0; i < k; ++i) cfg.ibft.key_holder.push_back(i);
    cfg.resource_kinds = {"authority"};
    cfg.node_resources.assign(k, {{1.0}});
    cfg.topology = sim::complete_topology(k, {sim::LatencyModel::Kind::Deterministic, 0.01});
    cfg.horizon = 10;
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(cfg, seed++));
}
BENCHMARK(BM_IbftRun)->DenseRange(4, 10, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
