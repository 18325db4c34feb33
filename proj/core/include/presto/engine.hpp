// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "presto/chain.hpp"
#include "presto/event.hpp"
#include "presto/node.hpp"
#include "presto/scenario.hpp"
#include "presto/strategy.hpp"
#include "presto/trace.hpp"

namespace presto::sim {

/// Single-threaded deterministic event loop over one scenario. Identical
/// (scenario, seed) pairs produce byte-identical traces; independent runs may
/// execute in parallel because instances share no mutable state.
class Simulation {
  public:
    Simulation(ScenarioConfig cfg, std::uint64_t seed);

    /// Processes events until the queue drains or the clock passes the
    /// horizon, then returns the complete trace.
    Trace run();

    /// Deep immutable copy of (V, H, M, r) for all nodes at the current clock.
    SystemSnapshot snapshot() const;

    double now() const { return now_; }

  private:
    friend class EngineContext;

    // --- setup ---------------------------------------------------------
    void init_nodes();
    void schedule_static_events();
    void init_strategies();

    // --- event handlers --------------------------------------------------
    void process(Event& e);
    void handle_block_mined(Event& e);
    void handle_block_arrival(Event& e);
    void handle_tx_created(Event& e);
    void handle_tx_arrival(Event& e);
    void handle_msg_arrival(Event& e);
    void handle_round_timeout(Event& e);
    void handle_partition(Event& e);
    void handle_wake(Event& e);

    // --- node/state helpers ---------------------------------------------
    void learn_tx(NodeId n, TxId tx);
    void apply_block(NodeId n, BlockId b);            // view insert + strategy + orphan drain
    void set_head(NodeId n, BlockId b);
    bool consider_head(NodeId n, BlockId challenger);
    BlockId build_block(NodeId n, BlockId parent, double work, bool into_dag);
    std::vector<TxId> pick_txs(NodeId n, BlockId parent, std::uint32_t capacity);
    void schedule_mining(NodeId n);
    double hash_fraction(NodeId n) const;

    // --- gossip / delivery ------------------------------------------------
    void gossip_block(NodeId origin, BlockId b, bool heal = false);
    void gossip_tx(NodeId origin, TxId tx);
    void send_ibft(NodeId origin, const protocol::IbftMessage& msg);
    void schedule(Event e);

    // --- IBFT round machine ------------------------------------------------
    void ibft_enter_round(NodeId n, std::uint64_t round);
    void ibft_progress(NodeId n);
    void ibft_finalize(NodeId n, std::uint64_t round, BlockId b);
    bool ibft_insert_msg(NodeId n, const protocol::IbftMessage& msg);
    std::size_t ibft_tally(NodeId n, std::uint64_t round, protocol::IbftMsgKind kind, BlockId b) const;
    bool is_validator(NodeId n) const { return !nodes_[n].keys.empty(); }

    void record_snapshot();
    void check_node_invariants(NodeId n) const;

    // --- data --------------------------------------------------------------
    ScenarioConfig cfg_;
    std::uint64_t seed_;
    strategy::ScenarioView view_;
    double now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_block_id_ = 1;
    TxId next_tx_id_ = 0;

    chain::BlockDag dag_;
    std::vector<NodeState> nodes_;
    std::vector<std::unique_ptr<strategy::Strategy>> strats_;
    EventQueue queue_;

    std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj_;
    std::vector<std::vector<int>> edge_between_;
    std::vector<double> resource_totals_;

    std::unordered_map<TxId, double> fee_of_;
    std::vector<chain::Transaction> transactions_;
    std::unordered_map<BlockId, chain::Block> candidates_;  // IBFT proposals not yet final

    std::vector<Rng> mine_rng_, workload_rng_, tie_rng_;
    Rng latency_rng_;

    std::vector<TraceEvent> events_;
    std::vector<SystemSnapshot> snapshots_;
    TraceEvent* cur_ = nullptr;  // record being assembled by the current event
};

/// One-call convenience wrapper.
Trace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace presto::sim
