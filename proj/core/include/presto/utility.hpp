// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <vector>

#include "presto/trace.hpp"

namespace presto::strategy {

/// The reference consensus chain of a trace: the finalized prefix of the
/// observer node's head chain at the horizon, oldest-first, genesis excluded.
std::vector<BlockId> reference_chain(const sim::Trace& trace);

struct RewardTally {
    std::vector<double> rewards;       // per node, tokens over the whole run
    std::vector<std::uint64_t> blocks; // finalized blocks won per node
    double total = 0;
    std::uint64_t chain_blocks = 0;    // finalized blocks in the reference chain
};

/// Rewards credited at finality: block reward + included fees (+ bonus) to the
/// creator of every block in the reference chain.
RewardTally finalized_rewards(const sim::Trace& trace, const sim::UtilityModel& model);

/// Finite-horizon estimator of the long-term average utility v_n:
/// (sum of action payoffs + integral of state rates) / horizon, tokens/second.
/// Errors: EmptyTrace when the horizon is not positive.
double estimate_utility(const sim::Trace& trace, NodeId n, const sim::UtilityModel& model);

/// Node n's share of all rewards distributed over the reference chain.
/// The standard relative-revenue measure; equals the post-retargeting
/// absolute revenue share for proof-of-work analyses.
double relative_revenue(const sim::Trace& trace, NodeId n, const sim::UtilityModel& model);

}  // namespace presto::strategy
