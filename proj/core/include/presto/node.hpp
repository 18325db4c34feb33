// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "presto/chain.hpp"
#include "presto/errors.hpp"
#include "presto/protocol.hpp"
#include "presto/types.hpp"

namespace presto::sim {

/// r_{n,i}: one non-negative amount per declared resource kind.
struct ResourceVector {
    std::vector<double> amounts;
};

/// Per-round consensus state for a keyed IBFT participant.
struct IbftLocal {
    std::uint64_t round = 0;
    BlockId proposal = kNoBlock;
    bool sent_prepare = false;
    bool sent_commit = false;
    bool sent_round_change = false;
    std::uint64_t timer_epoch = 0;
};

/// Private-chain bookkeeping for the selfish-mining strategy.
struct SelfishLocal {
    BlockId public_tip = kGenesisId;  // best tip among published blocks
    std::vector<BlockId> unpublished;  // own withheld blocks, oldest first
    bool race = false;                 // a tie race is in progress
};

struct NodeState {
    // V_n: every block this node is aware of. Ordered for determinism.
    std::set<BlockId> view;
    // First-seen order over `view`, drives fork-choice tie-breaking.
    std::vector<BlockId> seen_order;
    std::unordered_map<BlockId, std::uint64_t> seen_index;

    BlockId head = kGenesisId;  // H_n, always a member of view

    // M_n: pending transactions and protocol messages.
    std::set<TxId> known_txs;
    std::set<protocol::IbftMessage> msgs;
    // message tallies per (round, kind): block -> distinct signing keys
    std::map<std::pair<std::uint64_t, protocol::IbftMsgKind>, std::map<BlockId, std::set<KeyIndex>>> tallies;

    // txs not yet included in C(head), keyed (-fee, id) so iteration runs
    // highest fee first with id as the deterministic tiebreak
    std::set<std::pair<double, TxId>> available_txs;
    std::unordered_set<TxId> included_txs;  // txs on C(head)

    ResourceVector resources;
    std::string strategy;  // strategy id from the scenario profile

    // protocol-local state
    IbftLocal ibft;
    SelfishLocal selfish;
    std::uint64_t mining_epoch = 0;  // pending mining events with older epochs are stale
    std::vector<KeyIndex> keys;      // authority keys held (IBFT)

    // blocks waiting for their parent (orphan-pending buffer)
    std::unordered_map<BlockId, std::vector<BlockId>> pending_children;
    std::unordered_set<BlockId> pending;

    bool sees(BlockId b) const { return view.count(b) != 0; }
};

/// X_t: deep snapshot of every node's (V, H, M, r) at one instant.
struct NodeSnapshot {
    std::vector<BlockId> view;  // sorted
    BlockId head = kGenesisId;
    std::vector<TxId> mempool_txs;  // sorted
    std::size_t n_protocol_msgs = 0;
    std::vector<double> resources;
};

struct SystemSnapshot {
    double time = 0;
    std::vector<NodeSnapshot> nodes;
    std::uint64_t digest = 0;
};

/// p_{n,i} = r_{n,i} / R_i over the given per-node resource vectors.
/// Errors: ZeroTotalResource.
double resource_fraction(std::span<const ResourceVector> nodes, NodeId n, std::size_t kind);

/// true iff the group holds at least fraction alpha of resource `kind`.
/// Errors: ZeroTotalResource; ConfigInvalid if alpha outside [0, 1].
bool alpha_strong(std::span<const ResourceVector> nodes, const std::set<NodeId>& group, std::size_t kind,
                  double alpha);

}  // namespace presto::sim
