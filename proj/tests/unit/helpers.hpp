// Shared scenario builders and generators for the test suites.
#pragma once

#include <vector>

#include "presto/chain.hpp"
#include "presto/rng.hpp"
#include "presto/scenario.hpp"

namespace presto::testing {

inline sim::ScenarioConfig nakamoto_scenario(std::vector<double> hashpower, double mean_interval,
                                             double latency, double horizon) {
    sim::ScenarioConfig cfg;
    cfg.name = "test-nakamoto";
    cfg.protocol = protocol::ProtocolKind::Nakamoto;
    cfg.nakamoto.mean_block_interval = mean_interval;
    cfg.nakamoto.work_per_block = 1.0;
    cfg.nakamoto.block_reward = 1.0;
    cfg.n_nodes = static_cast<std::uint32_t>(hashpower.size());
    cfg.resource_kinds = {"hashpower"};
    for (double h : hashpower) cfg.node_resources.push_back({{h}});
    cfg.topology = sim::complete_topology(cfg.n_nodes, {sim::LatencyModel::Kind::Deterministic, latency});
    cfg.horizon = horizon;
    return cfg;
}

inline sim::ScenarioConfig ibft_scenario(std::uint32_t k, std::uint32_t n_nodes, double latency,
                                         double round_timeout, double horizon) {
    sim::ScenarioConfig cfg;
    cfg.name = "test-ibft";
    cfg.protocol = protocol::ProtocolKind::Ibft;
    cfg.ibft.k = k;
    cfg.ibft.round_timeout = round_timeout;
    cfg.n_nodes = n_nodes;
    for (KeyIndex i = 0; i < k; ++i) cfg.ibft.key_holder.push_back(i % n_nodes);
    cfg.resource_kinds = {"authority"};
    for (NodeId n = 0; n < n_nodes; ++n) cfg.node_resources.push_back({{0.0}});
    for (NodeId holder : cfg.ibft.key_holder) cfg.node_resources[holder].amounts[0] += 1;
    cfg.topology = sim::complete_topology(n_nodes, {sim::LatencyModel::Kind::Deterministic, latency});
    cfg.horizon = horizon;
    cfg.observer = n_nodes - 1;
    return cfg;
}

/// Random DAG with exact-FP work values (multiples of 0.25), parents drawn
/// uniformly among existing blocks.
inline chain::BlockDag random_dag(Rng& rng, std::size_t n_blocks) {
    chain::BlockDag dag;
    chain::Block genesis;
    genesis.id = kGenesisId;
    dag.add_block(genesis);
    for (BlockId id = 1; id < n_blocks; ++id) {
        chain::Block b;
        b.id = id;
        b.parent = rng.below(id);
        b.work = 0.25 * static_cast<double>(1 + rng.below(8));
        b.timestamp = static_cast<double>(id);
        dag.add_block(std::move(b));
    }
    return dag;
}

}  // namespace presto::testing
