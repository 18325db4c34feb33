// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "presto/chain.hpp"
#include "presto/rng.hpp"
#include "presto/types.hpp"

namespace presto::protocol {

enum class Tiebreak { FirstSeen, Uniform };

enum class ProtocolKind { Nakamoto, Ibft };

/// f(V): select a head from a view.
struct ForkChoiceRule {
    enum class Kind { MostWork, HighestQuorum } kind = Kind::MostWork;
    Tiebreak tiebreak = Tiebreak::FirstSeen;
};

/// When a block may be assumed to never be overturned.
struct FinalityRule {
    enum class Kind { KConfirmations, QuorumCommit } kind = Kind::KConfirmations;
    std::uint32_t k = 6;       // confirmations (KConfirmations)
    std::uint32_t quorum = 0;  // distinct commit keys (QuorumCommit)
};

struct NakamotoParams {
    double mean_block_interval = 600;  // network-wide mean seconds per block
    double work_per_block = 1.0;
    double block_reward = 1.0;
    std::uint32_t max_txs_per_block = 1000;
    bool fixed_fee_policy = false;  // true: ignore per-tx fees when crediting
    Tiebreak tiebreak = Tiebreak::FirstSeen;
    std::uint32_t confirmations = 6;
};

struct IbftParams {
    std::uint32_t k = 4;                 // number of validator keys
    std::vector<KeyIndex> rotation;      // proposer rotation order; default 0..k-1
    double round_timeout = 10;
    std::uint32_t quorum = 0;            // default floor(2k/3)+1
    std::vector<NodeId> key_holder;      // key i -> holding node
    double block_reward = 1.0;
    std::uint32_t max_txs_per_block = 1000;

    std::uint32_t effective_quorum() const { return quorum ? quorum : (2 * k) / 3 + 1; }
    KeyIndex rotation_at(std::uint64_t idx) const {
        return rotation.empty() ? static_cast<KeyIndex>(idx % k) : rotation[idx % rotation.size()];
    }
};

enum class IbftMsgKind : std::uint8_t { Proposal = 0, Prepare = 1, Commit = 2, RoundChange = 3 };

const char* ibft_msg_kind_name(IbftMsgKind k);

struct IbftMessage {
    IbftMsgKind kind = IbftMsgKind::Proposal;
    KeyIndex key = 0;           // signing key
    std::uint64_t round = 0;    // for RoundChange: the target round
    BlockId block = kNoBlock;   // kNoBlock for RoundChange

    auto operator<=>(const IbftMessage&) const = default;
};

/// Highest cumulative proof-of-work over the view. Ties: FirstSeen keeps the
/// earliest entry of `seen_order`; Uniform walks the view in seen order and
/// switches to each newer tied tip with probability 0.5.
/// Errors: EmptyView.
BlockId fork_choice_most_work(const std::vector<BlockId>& seen_order, const chain::BlockDag& dag,
                              Tiebreak tiebreak, Rng* rng);

/// All blocks that sit at depth >= k below some block of the view
/// (B = P^j(B') for some viewed B' and j >= k).
std::set<BlockId> finality_k_confirmations(const std::set<BlockId>& view, const chain::BlockDag& dag,
                                           std::uint32_t k);

/// Distinct commit-message keys for b within `msgs` reach the quorum.
bool ibft_valid(const chain::Block& b, const std::set<IbftMessage>& msgs, const IbftParams& params);

/// Quorum check against the commit keys recorded in the block payload
/// (how gossiped finalized blocks are accepted by non-voters).
bool ibft_payload_valid(const chain::Block& b, const IbftParams& params);

/// Round-robin proposer for a round.
KeyIndex ibft_proposer(std::uint64_t round, const IbftParams& params);

/// now + Exponential(mean_block_interval / hash_fraction).
/// Errors: ZeroHashPower.
double nakamoto_next_mining_time(double now, double hash_fraction, const NakamotoParams& params, Rng& rng);

}  // namespace presto::protocol
