// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/protocol.hpp"

#include <algorithm>

namespace presto::protocol {

const char* ibft_msg_kind_name(IbftMsgKind k) {
    switch (k) {
    case IbftMsgKind::Proposal: return "proposal";
    case IbftMsgKind::Prepare: return "prepare";
    case IbftMsgKind::Commit: return "commit";
    case IbftMsgKind::RoundChange: return "round_change";
    }
    return "?";
}

BlockId fork_choice_most_work(const std::vector<BlockId>& seen_order, const chain::BlockDag& dag,
                              Tiebreak tiebreak, Rng* rng) {
    if (seen_order.empty()) throw Error(errc::empty_view, "fork choice over an empty view");
    BlockId head = seen_order.front();
    double best = dag.cumulative_work(head);
    for (std::size_t i = 1; i < seen_order.size(); ++i) {
        const BlockId c = seen_order[i];
        const double w = dag.cumulative_work(c);
        if (w > best) {
            head = c;
            best = w;
        } else if (w == best && tiebreak == Tiebreak::Uniform && rng && rng->bernoulli(0.5)) {
            head = c;  // adopt the newer tied tip with probability 0.5
        }
        // FirstSeen: the block seen first is preferred, so ties keep `head`.
    }
    return head;
}

std::set<BlockId> finality_k_confirmations(const std::set<BlockId>& view, const chain::BlockDag& dag,
                                           std::uint32_t k) {
    std::set<BlockId> final;
    for (BlockId tip : view) {
        std::uint64_t h = dag.height(tip);
        if (h < k) continue;
        // deepest viewed descendant wins; walk down k steps then collect the rest
        BlockId cur = tip;
        for (std::uint32_t i = 0; i < k; ++i) cur = *dag.at(cur).parent;
        while (true) {
            auto [_, inserted] = final.insert(cur);
            if (!inserted) break;  // the rest of this chain is already collected
            const auto& parent = dag.at(cur).parent;
            if (!parent) break;
            cur = *parent;
        }
    }
    return final;
}

bool ibft_valid(const chain::Block& b, const std::set<IbftMessage>& msgs, const IbftParams& params) {
    std::set<KeyIndex> keys;
    for (const auto& m : msgs)
        if (m.kind == IbftMsgKind::Commit && m.block == b.id) keys.insert(m.key);
    return keys.size() >= params.effective_quorum();
}

bool ibft_payload_valid(const chain::Block& b, const IbftParams& params) {
    std::set<KeyIndex> keys(b.payload.commit_keys.begin(), b.payload.commit_keys.end());
    return keys.size() >= params.effective_quorum();
}

KeyIndex ibft_proposer(std::uint64_t round, const IbftParams& params) {
    return params.rotation_at(round);
}

double nakamoto_next_mining_time(double now, double hash_fraction, const NakamotoParams& params, Rng& rng) {
    if (hash_fraction <= 0)
        throw Error(errc::zero_hash_power, "mining requires positive hash power");
    return now + rng.exponential(params.mean_block_interval / hash_fraction);
}

}  // namespace presto::protocol
