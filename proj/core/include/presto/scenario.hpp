// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "presto/node.hpp"
#include "presto/protocol.hpp"
#include "presto/topology.hpp"
#include "presto/types.hpp"

namespace presto::sim {

inline constexpr const char* kScenarioSchema = "presto-scenario/1";

struct FeeDistribution {
    enum class Kind { Fixed, Uniform, Exponential } kind = Kind::Fixed;
    double a = 1.0;  // fixed value / lower bound / mean
    double b = 1.0;  // upper bound (Uniform)

    double sample(Rng& rng) const {
        switch (kind) {
        case Kind::Fixed: return a;
        case Kind::Uniform: return rng.uniform(a, b);
        case Kind::Exponential: return rng.exponential(a);
        }
        return a;
    }
};

struct WorkloadConfig {
    std::vector<double> tx_rates;  // per-node Poisson arrival rates (tx/s); empty = no workload
    FeeDistribution fee;
};

struct ScriptedEvent {
    enum class Kind { MineBlock, CreateTx, PublishWithheld } kind = Kind::MineBlock;
    double time = 0;
    NodeId node = 0;
    std::optional<BlockId> parent;  // nullopt: extend the creator's current head
    bool publish = true;
    double work = -1;  // < 0: protocol work_per_block
    double fee = 0;
};

/// u_n / u'_n: per-state cost rates and per-action payoffs used by the
/// utility estimator. Rewards are credited for blocks final in the reference
/// chain at the horizon.
struct UtilityModel {
    double block_reward_override = -1;  // < 0: use the protocol's block_reward
    bool include_fees = true;
    double per_block_bonus = 0;          // extra tokens per own finalized block
    double cost_rate_per_fraction = 0;   // tokens/s per unit of consensus-resource fraction
    double per_node_cost_rate = 0;       // tokens/s per node holding consensus resources
};

struct ScenarioConfig {
    std::string name = "scenario";
    protocol::ProtocolKind protocol = protocol::ProtocolKind::Nakamoto;
    protocol::NakamotoParams nakamoto;
    protocol::IbftParams ibft;

    std::uint32_t n_nodes = 1;
    std::vector<std::string> resource_kinds;   // declared per scenario
    std::vector<ResourceVector> node_resources;
    std::size_t consensus_resource = 0;        // index into resource_kinds

    Topology topology;
    WorkloadConfig workload;
    std::map<NodeId, std::string> strategies;  // overrides; default "honest"
    double selfish_gamma = 0;                  // honest tie preference for attacker blocks
    UtilityModel utility;

    double horizon = 1000;
    std::vector<ScriptedEvent> script;
    std::vector<double> snapshot_times;
    double snapshot_every = 0;  // > 0: additional periodic snapshots
    bool scripted_only = false;  // disable autonomous mining / voting / workload
    NodeId observer = 0;         // reference chain owner for throughput/fairness

    std::string strategy_of(NodeId n) const {
        auto it = strategies.find(n);
        return it == strategies.end() ? std::string("honest") : it->second;
    }
    bool protocol_following(NodeId n) const { return strategy_of(n) == "honest"; }

    protocol::FinalityRule finality() const {
        protocol::FinalityRule r;
        if (protocol == protocol::ProtocolKind::Nakamoto) {
            r.kind = protocol::FinalityRule::Kind::KConfirmations;
            r.k = nakamoto.confirmations;
        } else {
            r.kind = protocol::FinalityRule::Kind::QuorumCommit;
            r.quorum = ibft.effective_quorum();
        }
        return r;
    }

    double block_reward() const {
        return protocol == protocol::ProtocolKind::Nakamoto ? nakamoto.block_reward : ibft.block_reward;
    }

    /// Throws ConfigInvalid with a description of the first problem found.
    void validate() const;

    nlohmann::json to_json() const;
    static ScenarioConfig from_json(const nlohmann::json& j);
    static ScenarioConfig load_file(const std::string& path);

    std::string canonical() const { return to_json().dump(); }
    std::string digest() const;
};

/// Convenience builders used by tests and the sweep driver.
Topology complete_topology(std::uint32_t n_nodes, LatencyModel latency);
Topology line_topology(std::uint32_t n_nodes, LatencyModel latency);
Topology star_topology(std::uint32_t n_nodes, LatencyModel latency);  // node 0 is the hub

}  // namespace presto::sim
