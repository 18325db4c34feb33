// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "presto/protocol.hpp"
#include "presto/trace.hpp"

namespace presto::metrics {

using sim::Trace;

// --- fork / overturn / orphan detection --------------------------------------

/// Maximal interval during which >= 2 protocol-following nodes held
/// incompatible heads. `open` marks a fork unresolved at the horizon.
struct ForkInterval {
    double start = 0;
    double end = 0;
    bool open = false;
    std::vector<BlockId> tips;  // distinct heads when the fork began
};
std::vector<ForkInterval> detect_forks(const Trace& trace);

struct Overturn {
    BlockId block = 0;
    NodeId node = 0;
    double time = 0;
};
std::vector<Overturn> detect_overturns(const Trace& trace);

/// Blocks in the dag outside every node's head chain at the final time.
std::set<BlockId> detect_orphans(const Trace& trace);

// --- liveness / safety audits ---------------------------------------------

struct SafetyViolation {
    NodeId node = 0;
    BlockId block = 0;
    double t_final = 0;
    double t_violation = 0;
};
/// Finality is evaluated on each node's current head chain (depth >= k for
/// KConfirmations; the whole chain for QuorumCommit).
std::vector<SafetyViolation> audit_safety(const Trace& trace, const protocol::FinalityRule& rule);

struct LivenessFault {
    enum class Kind { TxTimeout, Stall } kind = Kind::TxTimeout;
    TxId tx = 0;
    NodeId node = 0;
    double t_submit = 0;
    double t_final = -1;   // -1: never finalized within the trace
    double gap_start = 0;  // Stall: window without finalization progress
    double gap_end = 0;
};
std::vector<LivenessFault> audit_liveness(const Trace& trace, double bound);

// --- concentration / fairness / voting power -----------------------------

/// Sum of squared percentage shares. `total` < 0 uses the sum of amounts;
/// an explicit total supports share tables that do not cover the market.
/// Errors: ZeroTotalResource.
double hhi(std::span<const double> amounts, double total = -1);
double hhi(const Trace& trace, const std::string& resource_kind);

/// Raw Banzhaf pivot counts: for each node, the number of coalitions S
/// containing it with weight(S) >= threshold and weight(S \ {n}) < threshold.
/// Exhaustive over 2^N. Errors: TooManyNodes for N > 20.
std::vector<std::uint64_t> pivotality(std::span<const double> weights, double threshold);

struct FairnessReport {
    std::vector<double> shares;     // reward share per node
    std::vector<double> fractions;  // consensus-resource fraction p_n
    std::vector<double> epsilons;   // max(0, 1 - share/p) where p > 0
    double epsilon = 0;             // max over nodes
    double total_rewards = 0;
};
/// Errors: ZeroRewards when no rewards were distributed.
FairnessReport fairness_measure(const Trace& trace, const sim::UtilityModel& model);

// --- throughput / message complexity / PoD  --------------------------------

/// Distinct transactions in the finalized prefix of the observer's chain,
/// divided by the horizon. Errors: EmptyTrace.
double throughput(const Trace& trace);

struct MessageComplexity {
    // consensus messages per finalized decision (complete rounds only)
    double proposals = 0;
    double prepares = 0;
    double commits = 0;
    double round_changes = 0;
    double total = 0;
    std::uint64_t decisions = 0;
    // block gossip: first deliveries per finalized block
    double block_msgs_per_block = 0;
    std::uint64_t finalized_blocks = 0;
};
/// Errors: NoFinalizedBlocks.
MessageComplexity message_complexity(const Trace& trace);

struct PodResult {
    double ratio = 0;
    bool positive_measure = true;  // interpretation flag: higher-is-better measure
};
/// Errors: DivisionByZero.
PodResult pod(double value_decentralized, double value_centralized, bool positive_measure = true);

// --- persistence ---------------------------------------------------------------

/// Piecewise-constant boolean property signal over [0, horizon],
/// right-continuous, including the final state value at the horizon.
struct BoolSignal {
    bool initial = true;
    std::vector<std::pair<double, bool>> changes;  // strictly increasing times
    double horizon = 0;

    bool value_at(double t) const {
        bool v = initial;
        for (const auto& [time, val] : changes) {
            if (time > t) break;
            v = val;
        }
        return v;
    }
};

enum class PersistenceMode { Weak, Strong };
enum class PersistenceVerdict { Holds, Falsified, Inconclusive };

/// Strong: holds iff the signal is 1 on (T', horizon] for some candidate
/// T' <= horizon - margin, falsified otherwise; weak: holds iff the property
/// recurs after every candidate point, inconclusive otherwise (a finite trace
/// cannot falsify recurrence). Empty margin window: inconclusive.
/// Errors: HorizonTooShort when horizon <= warmup.
PersistenceVerdict persistence_check(const BoolSignal& signal, double warmup, double margin,
                                     PersistenceMode mode);

/// Named trace property F : X -> {0,1} evaluated along the whole trace.
struct TraceProperty {
    std::string name;
    std::function<bool(const Trace&, std::span<const BlockId> heads)> predicate;
};
BoolSignal property_signal(const Trace& trace, const TraceProperty& prop);
/// "heads consistent": all protocol-following heads identical.
TraceProperty heads_consistent_property();
PersistenceVerdict persistence_check(const Trace& trace, const TraceProperty& prop, double warmup,
                                     double margin, PersistenceMode mode);

// --- report emission -------------------------------------------------------

struct ReportRow {
    std::string metric;
    std::string detail;
    double value = 0;
    std::string unit;
    std::string scenario_digest;
    std::uint64_t seed = 0;
};

std::string to_csv(std::span<const ReportRow> rows);

/// Every metric with trace-only inputs, evaluated with default parameters.
std::vector<ReportRow> standard_report(const Trace& trace, double liveness_bound);

}  // namespace presto::metrics
