// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "presto/digest.hpp"
#include "presto/errors.hpp"

namespace presto::sim {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(errc::config_invalid, what); }

json latency_to_json(const LatencyModel& m) {
    return {{"kind", m.kind == LatencyModel::Kind::Deterministic ? "deterministic" : "exponential"},
            {"value", m.value}};
}

LatencyModel latency_from_json(const json& j) {
    LatencyModel m;
    const std::string kind = j.value("kind", "deterministic");
    if (kind == "deterministic")
        m.kind = LatencyModel::Kind::Deterministic;
    else if (kind == "exponential")
        m.kind = LatencyModel::Kind::Exponential;
    else
        bad("unknown latency kind '" + kind + "'");
    m.value = j.value("value", 1.0);
    return m;
}

}  // namespace

bool Topology::connected(std::size_t n_nodes) const {
    if (n_nodes == 0) return true;
    std::vector<char> seen(n_nodes, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    auto adj = adjacency(n_nodes);
    std::size_t count = 1;
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        for (auto [peer, _] : adj[n]) {
            if (!seen[peer]) {
                seen[peer] = 1;
                ++count;
                stack.push_back(peer);
            }
        }
    }
    return count == n_nodes;
}

Topology complete_topology(std::uint32_t n_nodes, LatencyModel latency) {
    Topology t;
    for (NodeId a = 0; a < n_nodes; ++a)
        for (NodeId b = a + 1; b < n_nodes; ++b) t.edges.push_back({a, b, latency});
    return t;
}

Topology line_topology(std::uint32_t n_nodes, LatencyModel latency) {
    Topology t;
    for (NodeId a = 0; a + 1 < n_nodes; ++a) t.edges.push_back({a, static_cast<NodeId>(a + 1), latency});
    return t;
}

Topology star_topology(std::uint32_t n_nodes, LatencyModel latency) {
    Topology t;
    for (NodeId b = 1; b < n_nodes; ++b) t.edges.push_back({0, b, latency});
    return t;
}

void ScenarioConfig::validate() const {
    if (n_nodes == 0) bad("n_nodes must be >= 1");
    if (horizon < 0) bad("horizon must be >= 0");
    if (resource_kinds.empty()) bad("at least one resource kind must be declared");
    if (consensus_resource >= resource_kinds.size()) bad("consensus_resource out of range");
    if (node_resources.size() != n_nodes) bad("node_resources must list every node");
    for (const auto& rv : node_resources) {
        if (rv.amounts.size() != resource_kinds.size()) bad("resource vector arity mismatch");
        for (double a : rv.amounts)
            if (a < 0) bad("resource amounts must be >= 0");
    }
    for (const auto& e : topology.edges) {
        if (e.a >= n_nodes || e.b >= n_nodes) bad("topology edge references unknown node");
        if (e.a == e.b) bad("topology self-loops are not allowed");
        if (e.latency.value < 0) bad("edge latency must be >= 0");
        if (e.latency.kind == LatencyModel::Kind::Exponential && e.latency.value <= 0)
            bad("exponential latency mean must be > 0");
    }
    if (n_nodes > 1 && !topology.connected(n_nodes)) bad("topology must be connected when no partition is active");
    for (const auto& w : topology.partitions) {
        if (w.start >= w.end) bad("partition window must satisfy start < end");
        for (auto [a, b] : w.severed)
            if (a >= n_nodes || b >= n_nodes) bad("partition references unknown node");
    }
    if (protocol == protocol::ProtocolKind::Nakamoto) {
        if (nakamoto.mean_block_interval <= 0) bad("mean_block_interval must be > 0");
        if (nakamoto.work_per_block <= 0) bad("work_per_block must be > 0");
    } else {
        if (ibft.k == 0) bad("ibft.k must be >= 1");
        if (ibft.key_holder.size() != ibft.k) bad("ibft key assignment must cover all k keys");
        for (NodeId h : ibft.key_holder)
            if (h >= n_nodes) bad("ibft key held by unknown node");
        if (ibft.round_timeout <= 0) bad("ibft round_timeout must be > 0");
        if (ibft.effective_quorum() == 0 || ibft.effective_quorum() > ibft.k)
            bad("ibft quorum must lie in [1, k]");
        if (!ibft.rotation.empty()) {
            for (KeyIndex k : ibft.rotation)
                if (k >= ibft.k) bad("ibft rotation references unknown key");
        }
        // consensus messages are unicast between keyed nodes, so they must be adjacent
        std::set<NodeId> keyed(ibft.key_holder.begin(), ibft.key_holder.end());
        auto adj = topology.adjacency(n_nodes);
        for (NodeId a : keyed)
            for (NodeId b : keyed) {
                if (a >= b) continue;
                bool linked = false;
                for (auto [peer, _] : adj[a]) linked |= (peer == b);
                if (!linked) bad("ibft keyed nodes must be pairwise adjacent in the topology");
            }
    }
    if (!workload.tx_rates.empty() && workload.tx_rates.size() != n_nodes)
        bad("workload.tx_rates must be empty or list every node");
    for (double r : workload.tx_rates)
        if (r < 0) bad("tx rates must be >= 0");
    for (const auto& [n, s] : strategies) {
        if (n >= n_nodes) bad("strategy override for unknown node");
        if (s != "honest" && s != "selfish" && s != "withhold" && s != "crashed")
            bad("unknown strategy '" + s + "'");
        if (s == "selfish" && protocol != protocol::ProtocolKind::Nakamoto)
            bad("selfish mining requires the nakamoto protocol");
    }
    if (selfish_gamma < 0 || selfish_gamma > 1) bad("selfish_gamma must lie in [0, 1]");
    if (observer >= n_nodes) bad("observer out of range");
    for (const auto& ev : script)
        if (ev.node >= n_nodes) bad("scripted event references unknown node");
    for (double t : snapshot_times)
        if (t < 0) bad("snapshot times must be >= 0");
    if (snapshot_every < 0) bad("snapshot_every must be >= 0");
    if (snapshot_every > 0 && horizon / snapshot_every > 100000) bad("snapshot_every is too fine for the horizon");
}

json ScenarioConfig::to_json() const {
    json j;
    j["schema"] = kScenarioSchema;
    j["name"] = name;
    j["protocol"] = protocol == protocol::ProtocolKind::Nakamoto ? "nakamoto" : "ibft";
    if (protocol == protocol::ProtocolKind::Nakamoto) {
        j["nakamoto"] = {{"mean_block_interval", nakamoto.mean_block_interval},
                         {"work_per_block", nakamoto.work_per_block},
                         {"block_reward", nakamoto.block_reward},
                         {"max_txs_per_block", nakamoto.max_txs_per_block},
                         {"fixed_fee_policy", nakamoto.fixed_fee_policy},
                         {"tiebreak", nakamoto.tiebreak == protocol::Tiebreak::FirstSeen ? "first_seen" : "uniform"},
                         {"confirmations", nakamoto.confirmations}};
    } else {
        j["ibft"] = {{"k", ibft.k},
                     {"rotation", ibft.rotation},
                     {"round_timeout", ibft.round_timeout},
                     {"quorum", ibft.quorum},
                     {"keys", ibft.key_holder},
                     {"block_reward", ibft.block_reward},
                     {"max_txs_per_block", ibft.max_txs_per_block}};
    }
    j["n_nodes"] = n_nodes;
    j["resource_kinds"] = resource_kinds;
    j["consensus_resource"] = resource_kinds[consensus_resource];
    json res = json::array();
    for (const auto& rv : node_resources) res.push_back(rv.amounts);
    j["node_resources"] = res;

    json edges = json::array();
    for (const auto& e : topology.edges)
        edges.push_back({{"a", e.a}, {"b", e.b}, {"latency", latency_to_json(e.latency)}});
    json partitions = json::array();
    for (const auto& w : topology.partitions) {
        json sev = json::array();
        for (auto [a, b] : w.severed) sev.push_back({a, b});
        partitions.push_back({{"start", w.start}, {"end", w.end}, {"edges", sev}});
    }
    j["topology"] = {{"edges", edges}, {"partitions", partitions}};

    if (!workload.tx_rates.empty()) {
        const char* fk = workload.fee.kind == FeeDistribution::Kind::Fixed        ? "fixed"
                         : workload.fee.kind == FeeDistribution::Kind::Uniform    ? "uniform"
                                                                                  : "exponential";
        j["workload"] = {{"tx_rates", workload.tx_rates},
                         {"fee", {{"kind", fk}, {"a", workload.fee.a}, {"b", workload.fee.b}}}};
    }
    if (!strategies.empty()) {
        json s;
        for (const auto& [n, id] : strategies) s[std::to_string(n)] = id;
        j["strategies"] = s;
    }
    j["selfish_gamma"] = selfish_gamma;
    j["utility"] = {{"block_reward_override", utility.block_reward_override},
                    {"include_fees", utility.include_fees},
                    {"per_block_bonus", utility.per_block_bonus},
                    {"cost_rate_per_fraction", utility.cost_rate_per_fraction},
                    {"per_node_cost_rate", utility.per_node_cost_rate}};
    j["horizon"] = horizon;
    if (!script.empty()) {
        json sc = json::array();
        for (const auto& ev : script) {
            json e;
            e["t"] = ev.time;
            e["node"] = ev.node;
            switch (ev.kind) {
            case ScriptedEvent::Kind::MineBlock:
                e["kind"] = "mine";
                e["parent"] = ev.parent ? json(*ev.parent) : json("head");
                e["publish"] = ev.publish;
                if (ev.work >= 0) e["work"] = ev.work;
                break;
            case ScriptedEvent::Kind::CreateTx:
                e["kind"] = "tx";
                e["fee"] = ev.fee;
                break;
            case ScriptedEvent::Kind::PublishWithheld:
                e["kind"] = "publish_withheld";
                break;
            }
            sc.push_back(e);
        }
        j["script"] = sc;
    }
    if (!snapshot_times.empty()) j["snapshot_times"] = snapshot_times;
    if (snapshot_every > 0) j["snapshot_every"] = snapshot_every;
    j["scripted_only"] = scripted_only;
    j["observer"] = observer;
    return j;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    ScenarioConfig c;
    if (j.value("schema", kScenarioSchema) != std::string(kScenarioSchema))
        bad("unsupported scenario schema '" + j.value("schema", "") + "'");
    c.name = j.value("name", "scenario");
    const std::string proto = j.value("protocol", "nakamoto");
    if (proto == "nakamoto")
        c.protocol = protocol::ProtocolKind::Nakamoto;
    else if (proto == "ibft")
        c.protocol = protocol::ProtocolKind::Ibft;
    else
        bad("unknown protocol '" + proto + "'");

    if (j.contains("nakamoto")) {
        const json& n = j["nakamoto"];
        c.nakamoto.mean_block_interval = n.value("mean_block_interval", 600.0);
        c.nakamoto.work_per_block = n.value("work_per_block", 1.0);
        c.nakamoto.block_reward = n.value("block_reward", 1.0);
        c.nakamoto.max_txs_per_block = n.value("max_txs_per_block", 1000u);
        c.nakamoto.fixed_fee_policy = n.value("fixed_fee_policy", false);
        const std::string tb = n.value("tiebreak", "first_seen");
        if (tb == "first_seen")
            c.nakamoto.tiebreak = protocol::Tiebreak::FirstSeen;
        else if (tb == "uniform")
            c.nakamoto.tiebreak = protocol::Tiebreak::Uniform;
        else
            bad("unknown tiebreak '" + tb + "'");
        c.nakamoto.confirmations = n.value("confirmations", 6u);
    }
    if (j.contains("ibft")) {
        const json& n = j["ibft"];
        c.ibft.k = n.value("k", 4u);
        c.ibft.rotation = n.value("rotation", std::vector<KeyIndex>{});
        c.ibft.round_timeout = n.value("round_timeout", 10.0);
        c.ibft.quorum = n.value("quorum", 0u);
        c.ibft.key_holder = n.value("keys", std::vector<NodeId>{});
        c.ibft.block_reward = n.value("block_reward", 1.0);
        c.ibft.max_txs_per_block = n.value("max_txs_per_block", 1000u);
    }

    c.n_nodes = j.value("n_nodes", 1u);
    if (c.protocol == protocol::ProtocolKind::Ibft && c.ibft.key_holder.empty()) {
        // default 1:1 key assignment over the first k nodes
        for (KeyIndex k = 0; k < c.ibft.k; ++k) c.ibft.key_holder.push_back(k % c.n_nodes);
    }

    if (j.contains("resource_kinds")) c.resource_kinds = j["resource_kinds"].get<std::vector<std::string>>();
    if (c.resource_kinds.empty())
        c.resource_kinds = {c.protocol == protocol::ProtocolKind::Nakamoto ? "hashpower" : "authority"};
    if (j.contains("consensus_resource")) {
        const std::string kind = j["consensus_resource"].get<std::string>();
        auto it = std::find(c.resource_kinds.begin(), c.resource_kinds.end(), kind);
        if (it == c.resource_kinds.end()) bad("consensus_resource '" + kind + "' not declared");
        c.consensus_resource = static_cast<std::size_t>(it - c.resource_kinds.begin());
    }

    if (j.contains("node_resources")) {
        for (const auto& row : j["node_resources"]) {
            ResourceVector rv;
            rv.amounts = row.get<std::vector<double>>();
            c.node_resources.push_back(std::move(rv));
        }
    } else {
        // default: one unit of each declared kind per node; IBFT authority derives from keys
        c.node_resources.assign(c.n_nodes, ResourceVector{std::vector<double>(c.resource_kinds.size(), 1.0)});
        if (c.protocol == protocol::ProtocolKind::Ibft) {
            for (auto& rv : c.node_resources) rv.amounts[c.consensus_resource] = 0;
            for (NodeId h : c.ibft.key_holder) c.node_resources[h].amounts[c.consensus_resource] += 1;
        }
    }

    if (j.contains("topology")) {
        const json& t = j["topology"];
        if (t.contains("kind")) {
            const std::string kind = t["kind"].get<std::string>();
            LatencyModel lat = t.contains("latency") ? latency_from_json(t["latency"]) : LatencyModel{};
            if (kind == "complete")
                c.topology = complete_topology(c.n_nodes, lat);
            else if (kind == "line")
                c.topology = line_topology(c.n_nodes, lat);
            else if (kind == "star")
                c.topology = star_topology(c.n_nodes, lat);
            else
                bad("unknown topology kind '" + kind + "'");
        }
        if (t.contains("edges")) {
            for (const auto& e : t["edges"]) {
                EdgeSpec spec;
                spec.a = e.at("a").get<NodeId>();
                spec.b = e.at("b").get<NodeId>();
                if (e.contains("latency")) spec.latency = latency_from_json(e["latency"]);
                c.topology.edges.push_back(spec);
            }
        }
        if (t.contains("partitions")) {
            for (const auto& w : t["partitions"]) {
                PartitionWindow win;
                win.start = w.at("start").get<double>();
                win.end = w.at("end").get<double>();
                for (const auto& pair : w.at("edges"))
                    win.severed.emplace_back(pair.at(0).get<NodeId>(), pair.at(1).get<NodeId>());
                c.topology.partitions.push_back(std::move(win));
            }
        }
    } else {
        c.topology = complete_topology(c.n_nodes, LatencyModel{});
    }

    if (j.contains("workload")) {
        const json& w = j["workload"];
        if (w.contains("tx_rates")) {
            if (w["tx_rates"].is_number())
                c.workload.tx_rates.assign(c.n_nodes, w["tx_rates"].get<double>());
            else
                c.workload.tx_rates = w["tx_rates"].get<std::vector<double>>();
        }
        if (w.contains("fee")) {
            const json& f = w["fee"];
            const std::string kind = f.value("kind", "fixed");
            if (kind == "fixed")
                c.workload.fee.kind = FeeDistribution::Kind::Fixed;
            else if (kind == "uniform")
                c.workload.fee.kind = FeeDistribution::Kind::Uniform;
            else if (kind == "exponential")
                c.workload.fee.kind = FeeDistribution::Kind::Exponential;
            else
                bad("unknown fee distribution '" + kind + "'");
            c.workload.fee.a = f.value("a", 1.0);
            c.workload.fee.b = f.value("b", 1.0);
        }
    }

    if (j.contains("strategies"))
        for (const auto& [key, val] : j["strategies"].items())
            c.strategies[static_cast<NodeId>(std::stoul(key))] = val.get<std::string>();
    c.selfish_gamma = j.value("selfish_gamma", 0.0);

    if (j.contains("utility")) {
        const json& u = j["utility"];
        c.utility.block_reward_override = u.value("block_reward_override", -1.0);
        c.utility.include_fees = u.value("include_fees", true);
        c.utility.per_block_bonus = u.value("per_block_bonus", 0.0);
        c.utility.cost_rate_per_fraction = u.value("cost_rate_per_fraction", 0.0);
        c.utility.per_node_cost_rate = u.value("per_node_cost_rate", 0.0);
    }

    c.horizon = j.value("horizon", 1000.0);
    if (j.contains("script")) {
        for (const auto& e : j["script"]) {
            ScriptedEvent ev;
            ev.time = e.at("t").get<double>();
            ev.node = e.at("node").get<NodeId>();
            const std::string kind = e.at("kind").get<std::string>();
            if (kind == "mine") {
                ev.kind = ScriptedEvent::Kind::MineBlock;
                if (e.contains("parent") && !e["parent"].is_string()) ev.parent = e["parent"].get<BlockId>();
                ev.publish = e.value("publish", true);
                ev.work = e.value("work", -1.0);
            } else if (kind == "tx") {
                ev.kind = ScriptedEvent::Kind::CreateTx;
                ev.fee = e.value("fee", 0.0);
            } else if (kind == "publish_withheld") {
                ev.kind = ScriptedEvent::Kind::PublishWithheld;
            } else {
                bad("unknown scripted event kind '" + kind + "'");
            }
            c.script.push_back(ev);
        }
    }
    if (j.contains("snapshot_times")) c.snapshot_times = j["snapshot_times"].get<std::vector<double>>();
    c.snapshot_every = j.value("snapshot_every", 0.0);
    c.scripted_only = j.value("scripted_only", false);
    c.observer = j.value("observer", 0u);

    c.validate();
    return c;
}

ScenarioConfig ScenarioConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        bad("config parse error in '" + path + "': " + e.what());
    }
    return from_json(j);
}

std::string ScenarioConfig::digest() const { return to_hex(fnv1a(canonical())); }

}  // namespace presto::sim
