// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/metrics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "presto/utility.hpp"

namespace presto::metrics {

using sim::EventKind;
using sim::TraceEvent;

namespace {

/// Sequential head tracker: replays head_after updates in event order.
class HeadWalk {
  public:
    explicit HeadWalk(const Trace& trace)
        : trace_(trace), heads_(trace.scenario.n_nodes, kGenesisId) {}

    /// Calls fn(event, node, old_head, new_head) at every head change.
    template <typename Fn>
    void run(Fn&& fn) {
        for (const auto& e : trace_.events) {
            if (e.head_after == kNoBlock || e.node < 0) continue;
            const NodeId n = static_cast<NodeId>(e.node);
            const BlockId old = heads_[n];
            heads_[n] = e.head_after;
            fn(e, n, old, e.head_after);
        }
    }

    std::span<const BlockId> heads() const { return heads_; }

  private:
    const Trace& trace_;
    std::vector<BlockId> heads_;
};

}  // namespace

std::vector<ForkInterval> detect_forks(const Trace& trace) {
    std::vector<ForkInterval> out;
    std::vector<NodeId> honest;
    for (NodeId n = 0; n < trace.scenario.n_nodes; ++n)
        if (trace.protocol_following(n)) honest.push_back(n);
    if (honest.size() < 2) return out;

    std::vector<BlockId> heads(trace.scenario.n_nodes, kGenesisId);
    bool forked = false;
    auto any_incompatible = [&]() {
        for (std::size_t i = 0; i < honest.size(); ++i)
            for (std::size_t j = i + 1; j < honest.size(); ++j)
                if (trace.dag.incompatible(heads[honest[i]], heads[honest[j]])) return true;
        return false;
    };
    for (const auto& e : trace.events) {
        if (e.head_after == kNoBlock || e.node < 0) continue;
        const NodeId n = static_cast<NodeId>(e.node);
        heads[n] = e.head_after;
        if (!trace.protocol_following(n)) continue;
        const bool now_forked = any_incompatible();
        if (now_forked && !forked) {
            ForkInterval f;
            f.start = e.t;
            std::set<BlockId> tips;
            for (NodeId h : honest) tips.insert(heads[h]);
            f.tips.assign(tips.begin(), tips.end());
            out.push_back(std::move(f));
        } else if (!now_forked && forked) {
            out.back().end = e.t;
        }
        forked = now_forked;
    }
    if (forked) {
        out.back().end = trace.horizon;
        out.back().open = true;
    }
    return out;
}

std::vector<Overturn> detect_overturns(const Trace& trace) {
    std::vector<Overturn> out;
    HeadWalk walk(trace);
    walk.run([&](const TraceEvent& e, NodeId n, BlockId old, BlockId next) {
        const BlockId fork = trace.dag.common_prefix(old, next);
        for (BlockId lost : trace.dag.path_down_to(old, fork)) out.push_back({lost, n, e.t});
    });
    return out;
}

std::set<BlockId> detect_orphans(const Trace& trace) {
    std::set<BlockId> on_chains;
    for (const auto& node : trace.final_state.nodes)
        for (BlockId b : trace.dag.chain_of(node.head)) on_chains.insert(b);
    std::set<BlockId> orphans;
    for (BlockId b : trace.dag.all_ids_sorted())
        if (!on_chains.count(b)) orphans.insert(b);
    return orphans;
}

// ---------------------------------------------------------------------------

namespace {

/// Finalized frontier of a head chain under a rule: the deepest block such
/// that everything from it down to genesis is final. Nullopt when nothing is
/// final yet.
std::optional<BlockId> finalized_tip(const chain::BlockDag& dag, BlockId head,
                                     const protocol::FinalityRule& rule) {
    if (rule.kind == protocol::FinalityRule::Kind::QuorumCommit) return head;
    if (dag.height(head) < rule.k) return std::nullopt;
    BlockId cur = head;
    for (std::uint32_t i = 0; i < rule.k; ++i) cur = *dag.at(cur).parent;
    return cur;
}

}  // namespace

std::vector<SafetyViolation> audit_safety(const Trace& trace, const protocol::FinalityRule& rule) {
    std::vector<SafetyViolation> out;
    const std::uint32_t n_nodes = trace.scenario.n_nodes;
    std::vector<std::optional<BlockId>> frontier(n_nodes);
    std::vector<std::unordered_map<BlockId, double>> finalized_at(n_nodes);

    auto advance = [&](NodeId n, BlockId head, double t) {
        auto tip = finalized_tip(trace.dag, head, rule);
        if (!tip) return;
        if (!frontier[n]) {
            for (BlockId b : trace.dag.chain_of(*tip)) finalized_at[n].emplace(b, t);
            frontier[n] = tip;
            return;
        }
        const BlockId old = *frontier[n];
        if (old == *tip) return;
        const BlockId fork = trace.dag.common_prefix(old, *tip);
        for (BlockId lost : trace.dag.path_down_to(old, fork))
            out.push_back({n, lost, finalized_at[n].at(lost), t});
        for (BlockId gained : trace.dag.path_down_to(*tip, fork)) finalized_at[n].emplace(gained, t);
        frontier[n] = tip;
    };

    HeadWalk walk(trace);
    walk.run([&](const TraceEvent& e, NodeId n, BlockId, BlockId next) { advance(n, next, e.t); });
    return out;
}

std::vector<LivenessFault> audit_liveness(const Trace& trace, double bound) {
    if (bound <= 0) throw Error(errc::config_invalid, "liveness bound must be > 0");
    std::vector<LivenessFault> out;
    const auto rule = trace.scenario.finality();
    const std::uint32_t n_nodes = trace.scenario.n_nodes;

    std::vector<std::optional<BlockId>> frontier(n_nodes);
    std::unordered_map<TxId, double> tx_final;
    std::vector<double> progress_times;

    auto on_finalized_block = [&](NodeId n, BlockId b, double t) {
        for (TxId tx : trace.dag.at(b).txs) {
            if (trace.transactions[tx].creator != n) continue;
            tx_final.emplace(tx, t);
        }
    };
    auto advance = [&](NodeId n, BlockId head, double t) {
        auto tip = finalized_tip(trace.dag, head, rule);
        if (!tip) return;
        bool progressed = false;
        if (!frontier[n]) {
            for (BlockId b : trace.dag.chain_of(*tip)) on_finalized_block(n, b, t);
            frontier[n] = tip;
            progressed = true;
        } else if (*frontier[n] != *tip) {
            const BlockId fork = trace.dag.common_prefix(*frontier[n], *tip);
            for (BlockId gained : trace.dag.path_down_to(*tip, fork)) on_finalized_block(n, gained, t);
            frontier[n] = tip;
            progressed = true;
        }
        if (progressed) progress_times.push_back(t);
    };

    HeadWalk walk(trace);
    walk.run([&](const TraceEvent& e, NodeId n, BlockId, BlockId next) { advance(n, next, e.t); });

    // per-transaction faults, judged by the submitting node's finalized view
    for (const auto& tx : trace.transactions) {
        auto it = tx_final.find(tx.id);
        if (it != tx_final.end()) {
            if (it->second - tx.created_at > bound) {
                LivenessFault f;
                f.kind = LivenessFault::Kind::TxTimeout;
                f.tx = tx.id;
                f.node = tx.creator;
                f.t_submit = tx.created_at;
                f.t_final = it->second;
                out.push_back(f);
            }
        } else if (trace.horizon - tx.created_at > bound) {
            LivenessFault f;
            f.kind = LivenessFault::Kind::TxTimeout;
            f.tx = tx.id;
            f.node = tx.creator;
            f.t_submit = tx.created_at;
            out.push_back(f);
        }
    }

    // global stalls: windows without finalization progress anywhere
    double last = 0;
    auto flag_gap = [&](double from, double to) {
        if (to - from > bound) {
            LivenessFault f;
            f.kind = LivenessFault::Kind::Stall;
            f.gap_start = from;
            f.gap_end = to;
            out.push_back(f);
        }
    };
    for (double t : progress_times) {
        flag_gap(last, t);
        last = t;
    }
    flag_gap(last, trace.horizon);
    return out;
}

// ---------------------------------------------------------------------------

double hhi(std::span<const double> amounts, double total) {
    if (total < 0) {
        total = 0;
        for (double a : amounts) total += a;
    }
    if (total <= 0) throw Error(errc::zero_total_resource, "hhi requires a positive total");
    double sum = 0;
    for (double a : amounts) {
        const double pct = 100.0 * a / total;
        sum += pct * pct;
    }
    return sum;
}

double hhi(const Trace& trace, const std::string& resource_kind) {
    const auto& kinds = trace.scenario.resource_kinds;
    auto it = std::find(kinds.begin(), kinds.end(), resource_kind);
    if (it == kinds.end())
        throw Error(errc::config_invalid, "unknown resource kind '" + resource_kind + "'");
    const std::size_t kind = static_cast<std::size_t>(it - kinds.begin());
    std::vector<double> amounts;
    for (const auto& node : trace.final_state.nodes) amounts.push_back(node.resources[kind]);
    return hhi(amounts);
}

std::vector<std::uint64_t> pivotality(std::span<const double> weights, double threshold) {
    const std::size_t n = weights.size();
    if (n > 20) throw Error(errc::too_many_nodes, "pivotality enumerates 2^N coalitions; N <= 20");
    if (threshold <= 0 || threshold > 1) throw Error(errc::config_invalid, "threshold must lie in (0, 1]");
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw Error(errc::config_invalid, "weights must be >= 0");
        total += w;
    }
    if (total <= 0) throw Error(errc::zero_total_resource, "weights sum to zero");

    const std::uint32_t masks = 1u << n;
    std::vector<double> weight_of(masks, 0.0);
    for (std::uint32_t mask = 1; mask < masks; ++mask) {
        const std::uint32_t low = mask & (~mask + 1);
        const std::uint32_t bit = static_cast<std::uint32_t>(std::countr_zero(low));
        weight_of[mask] = weight_of[mask ^ low] + weights[bit] / total;
    }
    std::vector<std::uint64_t> counts(n, 0);
    for (std::uint32_t mask = 1; mask < masks; ++mask) {
        if (weight_of[mask] < threshold) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t bit = 1u << i;
            if ((mask & bit) && weight_of[mask ^ bit] < threshold) counts[i] += 1;
        }
    }
    return counts;
}

FairnessReport fairness_measure(const Trace& trace, const sim::UtilityModel& model) {
    const auto tally = strategy::finalized_rewards(trace, model);
    if (tally.total == 0) throw Error(errc::zero_rewards, "no rewards distributed over the trace");
    const auto& cfg = trace.scenario;
    FairnessReport rep;
    rep.total_rewards = tally.total;
    double total_res = 0;
    for (const auto& rv : cfg.node_resources) total_res += rv.amounts[cfg.consensus_resource];
    for (NodeId n = 0; n < cfg.n_nodes; ++n) {
        const double share = tally.rewards[n] / tally.total;
        const double p = total_res > 0 ? cfg.node_resources[n].amounts[cfg.consensus_resource] / total_res : 0;
        rep.shares.push_back(share);
        rep.fractions.push_back(p);
        rep.epsilons.push_back(p > 0 ? std::max(0.0, 1.0 - share / p) : 0.0);
    }
    rep.epsilon = *std::max_element(rep.epsilons.begin(), rep.epsilons.end());
    return rep;
}

double throughput(const Trace& trace) {
    if (trace.horizon <= 0) throw Error(errc::empty_trace, "throughput requires a positive horizon");
    std::set<TxId> txs;
    for (BlockId b : strategy::reference_chain(trace))
        for (TxId t : trace.dag.at(b).txs) txs.insert(t);
    return static_cast<double>(txs.size()) / trace.horizon;
}

MessageComplexity message_complexity(const Trace& trace) {
    MessageComplexity mc;
    const auto chain = strategy::reference_chain(trace);
    if (chain.empty()) throw Error(errc::no_finalized_blocks, "no finalized blocks in the reference chain");
    mc.finalized_blocks = chain.size();

    // block gossip: first deliveries of finalized blocks only (re-gossip
    // duplicates and the unsettled tail of the chain excluded)
    const std::set<BlockId> finalized(chain.begin(), chain.end());
    std::uint64_t block_msgs = 0;
    std::map<std::uint64_t, std::array<std::uint64_t, 4>> per_round;
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::BlockArrival) {
            if (!(e.flags & (TraceEvent::kDuplicate | TraceEvent::kDropped)) && finalized.count(e.block))
                ++block_msgs;
        } else if (e.kind == EventKind::ProtocolMsgArrival) {
            per_round[static_cast<std::uint64_t>(e.round)][static_cast<std::size_t>(e.msg_kind)] += 1;
        }
    }
    mc.block_msgs_per_block = static_cast<double>(block_msgs) / static_cast<double>(chain.size());

    if (trace.scenario.protocol == protocol::ProtocolKind::Ibft) {
        // count complete finalized decisions; the round finalized last may be
        // truncated by the horizon, so it is excluded when others exist
        std::vector<std::uint64_t> rounds;
        for (BlockId b : chain) rounds.push_back(trace.dag.at(b).payload.round);
        std::sort(rounds.begin(), rounds.end());
        if (rounds.size() > 1) rounds.pop_back();
        double p = 0, pr = 0, c = 0, rc = 0;
        for (std::uint64_t r : rounds) {
            const auto it = per_round.find(r);
            if (it == per_round.end()) continue;
            p += static_cast<double>(it->second[0]);
            pr += static_cast<double>(it->second[1]);
            c += static_cast<double>(it->second[2]);
        }
        for (const auto& [r, kinds] : per_round) rc += static_cast<double>(kinds[3]);
        const double d = static_cast<double>(rounds.size());
        mc.decisions = rounds.size();
        if (d > 0) {
            mc.proposals = p / d;
            mc.prepares = pr / d;
            mc.commits = c / d;
            mc.round_changes = rc / d;
            mc.total = (p + pr + c) / d;
        }
    } else {
        mc.decisions = chain.size();
        mc.total = mc.block_msgs_per_block;
    }
    return mc;
}

PodResult pod(double value_decentralized, double value_centralized, bool positive_measure) {
    if (value_centralized == 0) throw Error(errc::division_by_zero, "centralized baseline is zero");
    return {value_decentralized / value_centralized, positive_measure};
}

// ---------------------------------------------------------------------------

PersistenceVerdict persistence_check(const BoolSignal& signal, double warmup, double margin,
                                     PersistenceMode mode) {
    if (signal.horizon <= warmup)
        throw Error(errc::horizon_too_short, "persistence checking needs horizon > warmup");
    const double window_end = signal.horizon - margin;
    if (window_end < warmup || margin < 0) return PersistenceVerdict::Inconclusive;

    if (mode == PersistenceMode::Strong) {
        // last moment the signal was 0; the signal must be 1 from some
        // candidate point onward through the horizon
        if (!signal.value_at(signal.horizon)) return PersistenceVerdict::Falsified;
        double last_zero_end = 0;  // time of the last 0 -> 1 switch
        bool prev = signal.initial;
        for (const auto& [t, v] : signal.changes) {
            if (v && !prev) last_zero_end = t;
            prev = v;
        }
        if (!signal.initial && signal.changes.empty()) return PersistenceVerdict::Falsified;
        return last_zero_end <= window_end ? PersistenceVerdict::Holds : PersistenceVerdict::Falsified;
    }

    // weak: the binding candidate is T' = horizon - margin; the property must
    // be (or become) 1 at some t in (T', horizon]
    bool one_after = signal.value_at(window_end);  // right-continuous: extends past T'
    for (const auto& [t, v] : signal.changes)
        if (t > window_end && v) one_after = true;
    return one_after ? PersistenceVerdict::Holds : PersistenceVerdict::Inconclusive;
}

BoolSignal property_signal(const Trace& trace, const TraceProperty& prop) {
    BoolSignal sig;
    sig.horizon = trace.horizon;
    std::vector<BlockId> heads(trace.scenario.n_nodes, kGenesisId);
    sig.initial = prop.predicate(trace, heads);
    bool cur = sig.initial;
    for (const auto& e : trace.events) {
        if (e.head_after == kNoBlock || e.node < 0) continue;
        heads[static_cast<NodeId>(e.node)] = e.head_after;
        const bool v = prop.predicate(trace, heads);
        if (v != cur) {
            if (!sig.changes.empty() && sig.changes.back().first == e.t)
                sig.changes.back().second = v;
            else
                sig.changes.emplace_back(e.t, v);
            cur = v;
        }
    }
    return sig;
}

TraceProperty heads_consistent_property() {
    TraceProperty p;
    p.name = "heads_consistent";
    p.predicate = [](const Trace& trace, std::span<const BlockId> heads) {
        BlockId first = kNoBlock;
        for (NodeId n = 0; n < trace.scenario.n_nodes; ++n) {
            if (!trace.protocol_following(n)) continue;
            if (first == kNoBlock)
                first = heads[n];
            else if (heads[n] != first)
                return false;
        }
        return true;
    };
    return p;
}

PersistenceVerdict persistence_check(const Trace& trace, const TraceProperty& prop, double warmup,
                                     double margin, PersistenceMode mode) {
    return persistence_check(property_signal(trace, prop), warmup, margin, mode);
}

// ---------------------------------------------------------------------------

std::string to_csv(std::span<const ReportRow> rows) {
    std::ostringstream out;
    out << "metric,detail,value,unit,scenario,seed\n";
    out.precision(17);
    for (const auto& r : rows) {
        out << r.metric << ',' << r.detail << ',' << r.value << ',' << r.unit << ',' << r.scenario_digest
            << ',' << r.seed << '\n';
    }
    return out.str();
}

std::vector<ReportRow> standard_report(const Trace& trace, double liveness_bound) {
    std::vector<ReportRow> rows;
    const std::string digest = trace.scenario_digest;
    const std::uint64_t seed = trace.seed;
    auto add = [&](const std::string& metric, const std::string& detail, double value,
                   const std::string& unit) {
        rows.push_back({metric, detail, value, unit, digest, seed});
    };

    const auto forks = detect_forks(trace);
    add("forks", "count", static_cast<double>(forks.size()), "intervals");
    for (std::size_t i = 0; i < forks.size(); ++i) {
        add("forks", "interval_" + std::to_string(i) + "_start", forks[i].start, "s");
        add("forks", "interval_" + std::to_string(i) + "_end", forks[i].end, "s");
    }
    const auto overturns = detect_overturns(trace);
    add("overturns", "count", static_cast<double>(overturns.size()), "events");
    add("orphans", "count", static_cast<double>(detect_orphans(trace).size()), "blocks");
    add("safety", "violations", static_cast<double>(audit_safety(trace, trace.scenario.finality()).size()),
        "events");
    add("liveness", "faults", static_cast<double>(audit_liveness(trace, liveness_bound).size()), "events");
    add("hhi", trace.scenario.resource_kinds[trace.scenario.consensus_resource],
        hhi(trace, trace.scenario.resource_kinds[trace.scenario.consensus_resource]), "points");
    try {
        const auto fr = fairness_measure(trace, trace.scenario.utility);
        add("fairness", "epsilon_max", fr.epsilon, "fraction");
        for (NodeId n = 0; n < trace.scenario.n_nodes; ++n)
            add("fairness", "share_node_" + std::to_string(n), fr.shares[n], "fraction");
    } catch (const Error&) {
        // no rewards distributed: fairness undefined on this trace
    }
    add("throughput", "finalized", throughput(trace), "tx/s");
    try {
        const auto mc = message_complexity(trace);
        add("message_complexity", "per_decision", mc.total, "messages");
        add("message_complexity", "block_msgs_per_block", mc.block_msgs_per_block, "messages");
    } catch (const Error&) {
    }
    const auto verdict_w =
        persistence_check(trace, heads_consistent_property(), 0, trace.horizon * 0.1, PersistenceMode::Weak);
    const auto verdict_s = persistence_check(trace, heads_consistent_property(), 0, trace.horizon * 0.1,
                                             PersistenceMode::Strong);
    add("persistence", "heads_consistent_weak", verdict_w == PersistenceVerdict::Holds ? 1 : 0, "verdict");
    add("persistence", "heads_consistent_strong", verdict_s == PersistenceVerdict::Holds ? 1 : 0, "verdict");
    return rows;
}

}  // namespace presto::metrics
