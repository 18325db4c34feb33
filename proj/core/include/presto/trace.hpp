// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "presto/chain.hpp"
#include "presto/event.hpp"
#include "presto/node.hpp"
#include "presto/scenario.hpp"

namespace presto::sim {

inline constexpr const char* kTraceSchema = "presto-trace/1";

/// One processed event plus its externally visible effect. `head_after` is
/// the acting node's head after the event when it changed, kNoBlock otherwise.
struct TraceEvent {
    double t = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::StrategyWake;
    std::int32_t node = -1;
    std::int32_t from = -1;
    BlockId block = kNoBlock;
    BlockId parent = kNoBlock;
    TxId tx = 0;
    bool has_tx = false;
    double fee = 0;
    std::int8_t msg_kind = -1;
    std::int32_t key = -1;
    std::int64_t round = -1;
    BlockId msg_block = kNoBlock;
    BlockId head_after = kNoBlock;
    std::uint32_t flags = 0;
    std::int32_t snapshot = -1;  // index into Trace::snapshots for Snapshot records

    enum Flag : std::uint32_t {
        kDropped = 1u << 0,    // crossed a severed edge
        kDuplicate = 1u << 1,  // receiver already had it (no-op)
        kBuffered = 1u << 2,   // parent unknown, parked in the orphan buffer
        kHeal = 1u << 3,       // synthesized by a partition-heal view exchange
        kScripted = 1u << 4,
        kWithheld = 1u << 5,   // created but not gossiped
        kInert = 1u << 6,      // destination node is crashed
        kFinalized = 1u << 7,  // event finalized >= 1 block for this node
    };
};

/// The totally ordered execution record of one run. Replaying the embedded
/// (scenario, seed) reproduces the identical trace byte for byte.
struct Trace {
    std::uint64_t seed = 0;
    std::string scenario_digest;
    double horizon = 0;
    ScenarioConfig scenario;

    std::vector<TraceEvent> events;
    std::vector<SystemSnapshot> snapshots;
    SystemSnapshot final_state;
    chain::BlockDag dag;
    std::vector<chain::Transaction> transactions;  // indexed by TxId
    std::vector<std::string> node_strategies;

    bool protocol_following(NodeId n) const { return node_strategies[n] == "honest"; }

    std::string serialize() const;
    void write_file(const std::string& path) const;
    std::uint64_t checksum() const;

    /// Reads the header line only; the body is reproduced by re-running.
    struct Header {
        ScenarioConfig scenario;
        std::uint64_t seed = 0;
        std::string scenario_digest;
        std::uint64_t checksum = 0;
    };
    static Header read_header(const std::string& path);
};

}  // namespace presto::sim
