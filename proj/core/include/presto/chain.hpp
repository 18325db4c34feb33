// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "presto/errors.hpp"
#include "presto/types.hpp"

namespace presto::chain {

struct Transaction {
    TxId id = 0;
    double created_at = 0;  // seconds
    double fee = 0;         // tokens, >= 0
    NodeId creator = 0;
};

/// Commit-quorum evidence attached to BFT blocks (empty for mined blocks).
struct QuorumPayload {
    std::uint64_t round = 0;
    KeyIndex proposer_key = 0;
    std::vector<KeyIndex> commit_keys;  // sorted, distinct

    bool empty() const { return commit_keys.empty(); }
};

struct Block {
    BlockId id = 0;
    std::optional<BlockId> parent;  // nullopt iff genesis
    double timestamp = 0;           // T(B); monotonicity intentionally not enforced
    double work = 0;                // W(B); > 0 for mined blocks, 0 for genesis and BFT blocks
    std::vector<TxId> txs;          // ordered
    NodeId creator = 0;
    QuorumPayload payload;
};

/// Chain C(B): block ids tip-first, ending at genesis.
using Chain = std::vector<BlockId>;

/// Append-only block graph. Parents must be present before children, so
/// height and cumulative work are memoized at insertion and the parent
/// relation is acyclic by construction.
class BlockDag {
  public:
    /// Errors: DuplicateId if b.id present; MissingParent if the parent is
    /// absent (or a genesis shape is inserted into a non-empty dag).
    void add_block(Block b);

    bool contains(BlockId id) const { return entries_.count(id) != 0; }
    const Block& at(BlockId id) const { return entry(id).block; }
    BlockId genesis() const { return kGenesisId; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// C(B) = (B, P(B), P^2(B), ..., g).
    Chain chain_of(BlockId b) const;

    /// true iff a is in C(b). Reflexive; genesis is an ancestor of every block.
    bool is_ancestor(BlockId a, BlockId b) const;

    /// true iff neither block lies on the other's chain.
    bool incompatible(BlockId a, BlockId b) const { return !is_ancestor(a, b) && !is_ancestor(b, a); }

    /// Sum of W over C(b). O(1): memoized at insertion.
    double cumulative_work(BlockId b) const { return entry(b).cum_work; }

    /// Deepest block contained in both chains.
    BlockId common_prefix(BlockId a, BlockId b) const;

    /// Distance from genesis (genesis has height 0).
    std::uint64_t height(BlockId b) const { return entry(b).height; }

    /// Blocks on C(b) strictly below `ancestor` exclusive ... helper: walk from
    /// b up to (excluding) `stop`, tip-first. Precondition: stop on C(b).
    std::vector<BlockId> path_down_to(BlockId b, BlockId stop) const;

    std::vector<BlockId> all_ids_sorted() const;

  private:
    struct Entry {
        Block block;
        std::uint64_t height = 0;
        double cum_work = 0;
    };

    const Entry& entry(BlockId id) const {
        auto it = entries_.find(id);
        if (it == entries_.end())
            throw Error(errc::unknown_block, "block " + std::to_string(id) + " not in dag");
        return it->second;
    }

    std::unordered_map<BlockId, Entry> entries_;
};

}  // namespace presto::chain
