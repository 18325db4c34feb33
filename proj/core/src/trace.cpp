// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/trace.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "presto/digest.hpp"

namespace presto::sim {

using nlohmann::json;

const char* event_kind_name(EventKind k) {
    switch (k) {
    case EventKind::BlockMined: return "block_mined";
    case EventKind::BlockArrival: return "block_arrival";
    case EventKind::TxCreated: return "tx_created";
    case EventKind::TxArrival: return "tx_arrival";
    case EventKind::ProtocolMsgArrival: return "protocol_msg";
    case EventKind::RoundTimeout: return "round_timeout";
    case EventKind::PartitionChange: return "partition";
    case EventKind::StrategyWake: return "wake";
    case EventKind::Snapshot: return "snapshot";
    }
    return "?";
}

namespace {

void append_snapshot(std::string& out, const SystemSnapshot& s, const char* kind) {
    json j;
    j["kind"] = kind;
    j["t"] = s.time;
    j["digest"] = to_hex(s.digest);
    json nodes = json::array();
    for (const auto& n : s.nodes) {
        json jn;
        jn["view"] = n.view;
        jn["head"] = n.head;
        jn["mempool"] = n.mempool_txs;
        jn["msgs"] = n.n_protocol_msgs;
        jn["resources"] = n.resources;
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    out += j.dump();
    out += '\n';
}

}  // namespace

std::string Trace::serialize() const {
    std::string out;
    out.reserve(events.size() * 96 + 4096);
    {
        json header;
        header["schema"] = kTraceSchema;
        header["seed"] = seed;
        header["digest"] = scenario_digest;
        header["horizon"] = horizon;
        header["scenario"] = scenario.to_json();
        out += header.dump();
        out += '\n';
    }
    std::size_t snap_cursor = 0;
    for (const auto& e : events) {
        if (e.kind == EventKind::Snapshot) {
            if (e.snapshot >= 0 && static_cast<std::size_t>(e.snapshot) < snapshots.size()) {
                append_snapshot(out, snapshots[e.snapshot], "snapshot");
                snap_cursor = e.snapshot + 1;
            }
            continue;
        }
        json j;
        j["t"] = e.t;
        j["seq"] = e.seq;
        j["kind"] = event_kind_name(e.kind);
        if (e.node >= 0) j["node"] = e.node;
        if (e.from >= 0) j["from"] = e.from;
        if (e.block != kNoBlock) j["block"] = e.block;
        if (e.parent != kNoBlock) j["parent"] = e.parent;
        if (e.has_tx) {
            j["tx"] = e.tx;
            j["fee"] = e.fee;
        }
        if (e.msg_kind >= 0) {
            json extra;
            extra["type"] = protocol::ibft_msg_kind_name(static_cast<protocol::IbftMsgKind>(e.msg_kind));
            extra["key"] = e.key;
            extra["round"] = e.round;
            if (e.msg_block != kNoBlock) extra["block"] = e.msg_block;
            j["msg"] = std::move(extra);
        }
        if (e.head_after != kNoBlock) j["head"] = e.head_after;
        if (e.flags) j["flags"] = e.flags;
        out += j.dump();
        out += '\n';
    }
    (void)snap_cursor;
    append_snapshot(out, final_state, "final");
    return out;
}

std::uint64_t Trace::checksum() const { return fnv1a(serialize()); }

void Trace::write_file(const std::string& path) const {
    const std::string body = serialize();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(errc::config_invalid, "cannot write trace file '" + path + "'");
    f << body;
    json tail;
    tail["kind"] = "checksum";
    tail["fnv64"] = to_hex(fnv1a(body));
    f << tail.dump() << '\n';
}

Trace::Header Trace::read_header(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(errc::config_invalid, "cannot open trace file '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw Error(errc::config_invalid, "empty trace file '" + path + "'");
    json header;
    try {
        header = json::parse(line);
    } catch (const std::exception& e) {
        throw Error(errc::config_invalid, std::string("bad trace header: ") + e.what());
    }
    if (header.value("schema", "") != std::string(kTraceSchema))
        throw Error(errc::config_invalid, "unsupported trace schema");
    Header out;
    out.seed = header.at("seed").get<std::uint64_t>();
    out.scenario_digest = header.value("digest", "");
    out.scenario = ScenarioConfig::from_json(header.at("scenario"));

    // checksum over everything except the trailing checksum record
    std::string body = line + "\n";
    std::string prev;
    while (std::getline(f, line)) {
        if (!prev.empty()) body += prev + "\n";
        prev = line;
    }
    bool tail_is_checksum = prev.rfind("{\"fnv64\"", 0) == 0 || prev.find("\"kind\":\"checksum\"") != std::string::npos;
    if (!tail_is_checksum && !prev.empty()) body += prev + "\n";
    out.checksum = fnv1a(body);
    return out;
}

}  // namespace presto::sim
