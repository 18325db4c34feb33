// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <memory>
#include <string>

#include "presto/chain.hpp"
#include "presto/node.hpp"
#include "presto/protocol.hpp"
#include "presto/rng.hpp"

namespace presto::strategy {

/// Narrow view of the scenario a strategy is allowed to read.
struct ScenarioView {
    protocol::ProtocolKind protocol = protocol::ProtocolKind::Nakamoto;
    const protocol::NakamotoParams* nakamoto = nullptr;
    const protocol::IbftParams* ibft = nullptr;
    double selfish_gamma = 0;
    bool scripted_only = false;
};

/// Engine facade handed to strategy code. Everything a strategy may observe
/// or do goes through here, so decisions stay deterministic functions of
/// (observable state, triggering event, strategy RNG stream).
class Context {
  public:
    virtual ~Context() = default;

    virtual double now() const = 0;
    virtual NodeId self() const = 0;
    virtual const chain::BlockDag& dag() const = 0;
    virtual sim::NodeState& node() = 0;
    virtual const ScenarioView& config() const = 0;
    virtual Rng& rng() = 0;
    virtual double hash_fraction() const = 0;

    /// Build a block on `parent` from the node's mempool (greedy by fee, up to
    /// the protocol capacity), register it in the dag and the node's own view.
    /// Returns its id. The block is NOT gossiped.
    virtual BlockId make_block(BlockId parent) = 0;

    /// Gossip a block to all non-partitioned neighbors (first-receipt flooding).
    virtual void publish_block(BlockId b) = 0;

    /// Move this node's head; maintains the included-tx bookkeeping.
    virtual void set_head(BlockId b) = 0;

    /// Fold one fork-choice step: adopt `challenger` iff it beats the current
    /// head under most-work with the configured tiebreak. Returns true when
    /// the head changed.
    virtual bool consider_head(BlockId challenger) = 0;

    /// Cancel-and-resample the memoryless mining timer.
    virtual void schedule_mining() = 0;
};

/// s : X -> A. Hooks fire from the single simulation thread; the default
/// implementations are the follow-the-protocol behavior where the engine
/// does not already realize it.
class Strategy {
  public:
    virtual ~Strategy() = default;

    virtual const char* id() const = 0;

    /// Fully offline node: no relaying, no votes, no view updates.
    virtual bool inert() const { return false; }
    /// Re-gossip blocks/txs on first receipt.
    virtual bool relays() const { return true; }
    /// IBFT: emit proposals when scheduled as proposer.
    virtual bool ibft_proposes() const { return true; }
    /// IBFT: emit commit votes.
    virtual bool ibft_commits() const { return true; }

    virtual void init(Context& ctx);
    virtual void on_mining_success(Context& ctx);
    virtual void on_block(Context& ctx, const chain::Block& b);
    virtual void on_wake(Context&, const std::string&) {}
};

/// Factory for the strategy ids accepted in scenario profiles:
/// honest | selfish | withhold | crashed.
std::unique_ptr<Strategy> make_strategy(const std::string& id);

}  // namespace presto::strategy
