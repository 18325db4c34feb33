// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/utility.hpp"

#include <algorithm>

namespace presto::strategy {

using sim::Trace;
using sim::UtilityModel;

std::vector<BlockId> reference_chain(const Trace& trace) {
    const auto& cfg = trace.scenario;
    const BlockId head = trace.final_state.nodes[cfg.observer].head;
    const auto rule = cfg.finality();

    BlockId tip = head;
    if (rule.kind == protocol::FinalityRule::Kind::KConfirmations) {
        if (trace.dag.height(head) < rule.k) return {};
        for (std::uint32_t i = 0; i < rule.k; ++i) tip = *trace.dag.at(tip).parent;
    }
    auto chain = trace.dag.chain_of(tip);  // tip-first down to genesis
    chain.pop_back();                      // drop genesis: it has no creator
    std::reverse(chain.begin(), chain.end());
    return chain;
}

RewardTally finalized_rewards(const Trace& trace, const UtilityModel& model) {
    const auto& cfg = trace.scenario;
    RewardTally tally;
    tally.rewards.assign(cfg.n_nodes, 0.0);
    tally.blocks.assign(cfg.n_nodes, 0);
    const double base = model.block_reward_override >= 0 ? model.block_reward_override : cfg.block_reward();
    // a fixed fee policy pays the flat block reward only; per-tx fees are
    // credited otherwise
    const bool credit_fees = model.include_fees && !(cfg.protocol == protocol::ProtocolKind::Nakamoto &&
                                                     cfg.nakamoto.fixed_fee_policy);
    for (BlockId b : reference_chain(trace)) {
        const auto& blk = trace.dag.at(b);
        double credit = base + model.per_block_bonus;
        if (credit_fees)
            for (TxId t : blk.txs) credit += trace.transactions[t].fee;
        tally.rewards[blk.creator] += credit;
        tally.blocks[blk.creator] += 1;
        tally.total += credit;
        tally.chain_blocks += 1;
    }
    return tally;
}

double estimate_utility(const Trace& trace, NodeId n, const UtilityModel& model) {
    if (trace.horizon <= 0) throw Error(errc::empty_trace, "utility requires a positive horizon");
    const auto& cfg = trace.scenario;
    const auto tally = finalized_rewards(trace, model);

    double total_res = 0;
    for (const auto& rv : cfg.node_resources) total_res += rv.amounts[cfg.consensus_resource];
    const double own = cfg.node_resources[n].amounts[cfg.consensus_resource];
    const double fraction = total_res > 0 ? own / total_res : 0.0;

    double cost_rate = model.cost_rate_per_fraction * fraction;
    if (own > 0) cost_rate += model.per_node_cost_rate;
    return tally.rewards[n] / trace.horizon - cost_rate;
}

double relative_revenue(const Trace& trace, NodeId n, const UtilityModel& model) {
    const auto tally = finalized_rewards(trace, model);
    return tally.total > 0 ? tally.rewards[n] / tally.total : 0.0;
}

}  // namespace presto::strategy
