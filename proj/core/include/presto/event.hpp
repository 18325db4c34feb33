// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "presto/errors.hpp"
#include "presto/protocol.hpp"
#include "presto/types.hpp"

namespace presto::sim {

enum class EventKind : std::uint8_t {
    BlockMined,
    BlockArrival,
    TxCreated,
    TxArrival,
    ProtocolMsgArrival,
    RoundTimeout,
    PartitionChange,
    StrategyWake,
    Snapshot,  // internal: records a state digest into the trace
};

const char* event_kind_name(EventKind k);

struct Event {
    double time = 0;
    std::uint64_t seq = 0;  // global tiebreak counter, unique
    EventKind kind = EventKind::StrategyWake;

    NodeId node = 0;          // destination (arrivals) or actor (mined/created/timeout/wake)
    NodeId from = 0;          // sender, for arrivals
    BlockId block = kNoBlock;
    TxId tx = 0;
    protocol::IbftMessage msg;
    std::uint64_t epoch = 0;    // staleness guard for BlockMined / RoundTimeout
    std::uint64_t round = 0;    // RoundTimeout
    std::size_t script_index = static_cast<std::size_t>(-1);  // scripted BlockMined/TxCreated/Wake
    std::size_t partition_index = 0;
    bool partition_start = false;
    bool dropped = false;  // arrival crosses a severed edge: logged, no effect
    bool heal = false;     // arrival synthesized by a partition-heal view exchange
    std::string wake_tag;
};

/// Min-heap on (time, seq). Pop order is deterministic because seq is unique.
class EventQueue {
  public:
    /// Errors: TimeInPast if e.time precedes the current clock.
    void schedule(Event e, double now) {
        if (e.time < now)
            throw Error(errc::time_in_past, "event scheduled at " + std::to_string(e.time) +
                                                " before clock " + std::to_string(now));
        heap_.push(std::move(e));
    }

    bool empty() const { return heap_.empty(); }
    const Event& top() const { return heap_.top(); }
    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }
    std::size_t size() const { return heap_.size(); }

  private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

}  // namespace presto::sim
