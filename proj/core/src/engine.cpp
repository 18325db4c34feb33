// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/engine.hpp"

#include <algorithm>
#include <cassert>

#include "presto/digest.hpp"
#include "presto/protocol.hpp"

namespace presto::sim {

using protocol::IbftMessage;
using protocol::IbftMsgKind;
using protocol::ProtocolKind;

double resource_fraction(std::span<const ResourceVector> nodes, NodeId n, std::size_t kind) {
    double total = 0;
    for (const auto& rv : nodes) total += rv.amounts[kind];
    if (total <= 0) throw Error(errc::zero_total_resource, "resource kind has zero total");
    return nodes[n].amounts[kind] / total;
}

bool alpha_strong(std::span<const ResourceVector> nodes, const std::set<NodeId>& group, std::size_t kind,
                  double alpha) {
    if (alpha < 0 || alpha > 1) throw Error(errc::config_invalid, "alpha must lie in [0, 1]");
    double total = 0;
    for (const auto& rv : nodes) total += rv.amounts[kind];
    if (total <= 0) throw Error(errc::zero_total_resource, "resource kind has zero total");
    double sum = 0;
    for (NodeId n : group) sum += nodes[n].amounts[kind];
    return sum / total >= alpha;
}

// ---------------------------------------------------------------------------

class EngineContext final : public strategy::Context {
  public:
    EngineContext(Simulation& sim, NodeId n);
    double now() const override;
    NodeId self() const override { return n_; }
    const chain::BlockDag& dag() const override;
    NodeState& node() override;
    const strategy::ScenarioView& config() const override;
    Rng& rng() override;
    double hash_fraction() const override;
    BlockId make_block(BlockId parent) override;
    void publish_block(BlockId b) override;
    void set_head(BlockId b) override;
    bool consider_head(BlockId challenger) override;
    void schedule_mining() override;

  private:
    Simulation& sim_;
    NodeId n_;
};

Simulation::Simulation(ScenarioConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {
    cfg_.validate();
    view_.protocol = cfg_.protocol;
    view_.nakamoto = &cfg_.nakamoto;
    view_.ibft = &cfg_.ibft;
    view_.selfish_gamma = cfg_.selfish_gamma;
    view_.scripted_only = cfg_.scripted_only;
    init_nodes();
}

void Simulation::init_nodes() {
    adj_ = cfg_.topology.adjacency(cfg_.n_nodes);
    edge_between_.assign(cfg_.n_nodes, std::vector<int>(cfg_.n_nodes, -1));
    for (std::size_t i = 0; i < cfg_.topology.edges.size(); ++i) {
        const auto& e = cfg_.topology.edges[i];
        edge_between_[e.a][e.b] = static_cast<int>(i);
        edge_between_[e.b][e.a] = static_cast<int>(i);
    }

    chain::Block genesis;
    genesis.id = kGenesisId;
    genesis.parent.reset();
    genesis.timestamp = 0;
    genesis.work = 0;
    dag_.add_block(genesis);

    resource_totals_.assign(cfg_.resource_kinds.size(), 0.0);
    nodes_.resize(cfg_.n_nodes);
    for (NodeId n = 0; n < cfg_.n_nodes; ++n) {
        auto& node = nodes_[n];
        node.view.insert(kGenesisId);
        node.seen_order.push_back(kGenesisId);
        node.seen_index.emplace(kGenesisId, 0);
        node.head = kGenesisId;
        node.resources = cfg_.node_resources[n];
        node.strategy = cfg_.strategy_of(n);
        for (std::size_t k = 0; k < resource_totals_.size(); ++k)
            resource_totals_[k] += node.resources.amounts[k];
        strats_.push_back(strategy::make_strategy(node.strategy));
        mine_rng_.emplace_back(seed_, "mine/" + std::to_string(n));
        workload_rng_.emplace_back(seed_, "workload/" + std::to_string(n));
        tie_rng_.emplace_back(seed_, "tie/" + std::to_string(n));
    }
    latency_rng_ = Rng(seed_, "latency");
    if (cfg_.protocol == ProtocolKind::Ibft)
        for (KeyIndex k = 0; k < cfg_.ibft.k; ++k) nodes_[cfg_.ibft.key_holder[k]].keys.push_back(k);
}

double Simulation::hash_fraction(NodeId n) const {
    const double total = resource_totals_[cfg_.consensus_resource];
    if (total <= 0) return 0;
    return nodes_[n].resources.amounts[cfg_.consensus_resource] / total;
}

void Simulation::schedule(Event e) {
    e.seq = next_seq_++;
    queue_.schedule(std::move(e), now_);
}

void Simulation::schedule_static_events() {
    for (std::size_t i = 0; i < cfg_.topology.partitions.size(); ++i) {
        const auto& w = cfg_.topology.partitions[i];
        Event start;
        start.time = w.start;
        start.kind = EventKind::PartitionChange;
        start.partition_index = i;
        start.partition_start = true;
        schedule(start);
        Event end = start;
        end.time = w.end;
        end.partition_start = false;
        schedule(end);
    }
    for (std::size_t i = 0; i < cfg_.script.size(); ++i) {
        const auto& s = cfg_.script[i];
        Event e;
        e.time = s.time;
        e.node = s.node;
        e.script_index = i;
        switch (s.kind) {
        case ScriptedEvent::Kind::MineBlock: e.kind = EventKind::BlockMined; break;
        case ScriptedEvent::Kind::CreateTx: e.kind = EventKind::TxCreated; break;
        case ScriptedEvent::Kind::PublishWithheld:
            e.kind = EventKind::StrategyWake;
            e.wake_tag = "publish_withheld";
            break;
        }
        schedule(e);
    }
    for (double t : cfg_.snapshot_times) {
        Event e;
        e.time = t;
        e.kind = EventKind::Snapshot;
        schedule(e);
    }
    if (cfg_.snapshot_every > 0) {
        for (double t = cfg_.snapshot_every; t <= cfg_.horizon; t += cfg_.snapshot_every) {
            Event e;
            e.time = t;
            e.kind = EventKind::Snapshot;
            schedule(e);
        }
    }
    if (!cfg_.scripted_only && !cfg_.workload.tx_rates.empty()) {
        for (NodeId n = 0; n < cfg_.n_nodes; ++n) {
            const double rate = cfg_.workload.tx_rates[n];
            if (rate <= 0) continue;
            Event e;
            e.time = workload_rng_[n].exponential(1.0 / rate);
            e.kind = EventKind::TxCreated;
            e.node = n;
            schedule(e);
        }
    }
}

void Simulation::init_strategies() {
    for (NodeId n = 0; n < cfg_.n_nodes; ++n) {
        EngineContext ctx(*this, n);
        strats_[n]->init(ctx);
    }
    if (cfg_.protocol == ProtocolKind::Ibft && !cfg_.scripted_only) {
        for (NodeId n = 0; n < cfg_.n_nodes; ++n)
            if (is_validator(n) && !strats_[n]->inert()) ibft_enter_round(n, 0);
    }
}

Trace Simulation::run() {
    record_snapshot();  // X_0: all views are {g}
    schedule_static_events();
    init_strategies();

    while (!queue_.empty()) {
        if (queue_.top().time > cfg_.horizon) break;
        Event e = queue_.pop();
        now_ = e.time;
        // stale timers vanish silently: they carry no state change
        if (e.kind == EventKind::BlockMined && e.script_index == static_cast<std::size_t>(-1) &&
            e.epoch != nodes_[e.node].mining_epoch)
            continue;
        if (e.kind == EventKind::RoundTimeout && e.epoch != nodes_[e.node].ibft.timer_epoch) continue;
        process(e);
    }
    now_ = cfg_.horizon;

    Trace trace;
    trace.seed = seed_;
    trace.scenario_digest = cfg_.digest();
    trace.horizon = cfg_.horizon;
    trace.scenario = cfg_;
    trace.events = std::move(events_);
    trace.snapshots = std::move(snapshots_);
    trace.final_state = snapshot();
    trace.dag = std::move(dag_);
    trace.transactions = std::move(transactions_);
    for (NodeId n = 0; n < cfg_.n_nodes; ++n) trace.node_strategies.push_back(nodes_[n].strategy);
    return trace;
}

void Simulation::process(Event& e) {
    TraceEvent rec;
    rec.t = e.time;
    rec.seq = e.seq;
    rec.kind = e.kind;
    rec.node = e.kind == EventKind::PartitionChange || e.kind == EventKind::Snapshot
                   ? -1
                   : static_cast<std::int32_t>(e.node);
    cur_ = &rec;

    switch (e.kind) {
    case EventKind::BlockMined: handle_block_mined(e); break;
    case EventKind::BlockArrival: handle_block_arrival(e); break;
    case EventKind::TxCreated: handle_tx_created(e); break;
    case EventKind::TxArrival: handle_tx_arrival(e); break;
    case EventKind::ProtocolMsgArrival: handle_msg_arrival(e); break;
    case EventKind::RoundTimeout: handle_round_timeout(e); break;
    case EventKind::PartitionChange: handle_partition(e); break;
    case EventKind::StrategyWake: handle_wake(e); break;
    case EventKind::Snapshot:
        record_snapshot();
        rec.snapshot = static_cast<std::int32_t>(snapshots_.size()) - 1;
        break;
    }

    cur_ = nullptr;
    const std::int32_t acted = rec.node;
    events_.push_back(rec);
    if (acted >= 0) check_node_invariants(static_cast<NodeId>(acted));
}

// --- block creation --------------------------------------------------------

std::vector<TxId> Simulation::pick_txs(NodeId n, BlockId parent, std::uint32_t capacity) {
    auto& node = nodes_[n];
    std::vector<TxId> out;
    if (capacity == 0) return out;
    if (parent == node.head) {
        for (const auto& [negfee, tx] : node.available_txs) {
            out.push_back(tx);
            if (out.size() >= capacity) break;
        }
        return out;
    }
    // building off-head (scripted chains): walk the parent chain explicitly
    std::unordered_set<TxId> included;
    for (BlockId b : dag_.chain_of(parent))
        for (TxId t : dag_.at(b).txs) included.insert(t);
    for (const auto& [negfee, tx] : node.available_txs) {
        if (included.count(tx)) continue;
        out.push_back(tx);
        if (out.size() >= capacity) break;
    }
    return out;
}

BlockId Simulation::build_block(NodeId n, BlockId parent, double work, bool into_dag) {
    chain::Block b;
    b.id = next_block_id_++;
    b.parent = parent;
    b.timestamp = now_;
    b.work = work;
    b.creator = n;
    const std::uint32_t capacity = cfg_.protocol == ProtocolKind::Nakamoto ? cfg_.nakamoto.max_txs_per_block
                                                                           : cfg_.ibft.max_txs_per_block;
    b.txs = pick_txs(n, parent, capacity);
    const BlockId id = b.id;
    if (cur_ && cur_->kind == EventKind::BlockMined) {
        cur_->block = id;
        cur_->parent = parent;
    }
    if (into_dag) {
        dag_.add_block(std::move(b));
        auto& node = nodes_[n];
        node.view.insert(id);
        node.seen_index.emplace(id, node.seen_order.size());
        node.seen_order.push_back(id);
    } else {
        candidates_.emplace(id, std::move(b));
    }
    return id;
}

void Simulation::set_head(NodeId n, BlockId b) {
    auto& node = nodes_[n];
    if (node.head == b) return;
    const BlockId old = node.head;
    const BlockId fork = dag_.common_prefix(old, b);
    // blocks leaving the head chain release their txs back to the mempool
    for (BlockId lost : dag_.path_down_to(old, fork)) {
        for (TxId tx : dag_.at(lost).txs) {
            if (node.included_txs.erase(tx)) node.available_txs.emplace(-fee_of_.at(tx), tx);
        }
    }
    for (BlockId gained : dag_.path_down_to(b, fork)) {
        for (TxId tx : dag_.at(gained).txs) {
            node.known_txs.insert(tx);
            node.available_txs.erase({-fee_of_.at(tx), tx});
            node.included_txs.insert(tx);
        }
    }
    node.head = b;
    if (cur_ && cur_->node == static_cast<std::int32_t>(n)) cur_->head_after = b;
}

bool Simulation::consider_head(NodeId n, BlockId challenger) {
    auto& node = nodes_[n];
    if (challenger == node.head) return false;
    if (cfg_.protocol == ProtocolKind::Ibft) {
        if (dag_.height(challenger) > dag_.height(node.head)) {
            set_head(n, challenger);
            return true;
        }
        return false;
    }
    const double wc = dag_.cumulative_work(challenger);
    const double wh = dag_.cumulative_work(node.head);
    bool adopt = wc > wh;
    if (!adopt && wc == wh) {
        if (cfg_.nakamoto.tiebreak == protocol::Tiebreak::Uniform) {
            adopt = tie_rng_[n].bernoulli(0.5);
        } else if (cfg_.selfish_gamma > 0 && node.strategy == "honest" &&
                   nodes_[dag_.at(challenger).creator].strategy == "selfish") {
            // connectivity knob: an honest node prefers the attacker's tied tip
            // with probability gamma instead of keeping the first-seen block
            adopt = tie_rng_[n].bernoulli(cfg_.selfish_gamma);
        }
    }
    if (adopt) set_head(n, challenger);
    return adopt;
}

void Simulation::schedule_mining(NodeId n) {
    if (cfg_.protocol != ProtocolKind::Nakamoto || cfg_.scripted_only) return;
    const double p = hash_fraction(n);
    if (p <= 0) return;
    auto& node = nodes_[n];
    Event e;
    e.kind = EventKind::BlockMined;
    e.node = n;
    e.epoch = ++node.mining_epoch;
    e.time = protocol::nakamoto_next_mining_time(now_, p, cfg_.nakamoto, mine_rng_[n]);
    schedule(e);
}

// --- gossip ------------------------------------------------------------------

void Simulation::gossip_block(NodeId origin, BlockId b, bool heal) {
    for (auto [peer, edge] : adj_[origin]) {
        Event e;
        e.kind = EventKind::BlockArrival;
        e.node = peer;
        e.from = origin;
        e.block = b;
        e.heal = heal;
        e.time = now_ + cfg_.topology.edges[edge].latency.sample(latency_rng_);
        e.dropped = cfg_.topology.severed_during(edge, now_, e.time);
        schedule(e);
    }
}

void Simulation::gossip_tx(NodeId origin, TxId tx) {
    for (auto [peer, edge] : adj_[origin]) {
        Event e;
        e.kind = EventKind::TxArrival;
        e.node = peer;
        e.from = origin;
        e.tx = tx;
        e.time = now_ + cfg_.topology.edges[edge].latency.sample(latency_rng_);
        e.dropped = cfg_.topology.severed_during(edge, now_, e.time);
        schedule(e);
    }
}

void Simulation::send_ibft(NodeId origin, const IbftMessage& msg) {
    // flooding among keyed nodes: one unicast per other key-holding node
    std::set<NodeId> holders;
    for (KeyIndex k = 0; k < cfg_.ibft.k; ++k) holders.insert(cfg_.ibft.key_holder[k]);
    for (NodeId peer : holders) {
        if (peer == origin) continue;
        const int edge = edge_between_[origin][peer];
        if (edge < 0) continue;  // validated not to happen
        Event e;
        e.kind = EventKind::ProtocolMsgArrival;
        e.node = peer;
        e.from = origin;
        e.msg = msg;
        e.time = now_ + cfg_.topology.edges[edge].latency.sample(latency_rng_);
        e.dropped = cfg_.topology.severed_during(edge, now_, e.time);
        schedule(e);
    }
    ibft_insert_msg(origin, msg);  // a node counts its own vote immediately
}

// --- event handlers -----------------------------------------------------------

void Simulation::handle_block_mined(Event& e) {
    const NodeId n = e.node;
    if (e.script_index != static_cast<std::size_t>(-1)) {
        const auto& s = cfg_.script[e.script_index];
        cur_->flags |= TraceEvent::kScripted;
        const BlockId parent = s.parent ? *s.parent : nodes_[n].head;
        if (!nodes_[n].sees(parent))
            throw Error(errc::config_invalid, "scripted block parent not in creator's view");
        const double work =
            s.work >= 0 ? s.work
                        : (cfg_.protocol == ProtocolKind::Nakamoto ? cfg_.nakamoto.work_per_block : 0.0);
        const BlockId b = build_block(n, parent, work, /*into_dag=*/true);
        consider_head(n, b);
        if (s.publish) {
            gossip_block(n, b);
        } else {
            nodes_[n].selfish.unpublished.push_back(b);
            cur_->flags |= TraceEvent::kWithheld;
        }
        return;
    }
    EngineContext ctx(*this, n);
    strats_[n]->on_mining_success(ctx);
}

void Simulation::apply_block(NodeId n, BlockId b) {
    auto& node = nodes_[n];
    node.view.insert(b);
    node.seen_index.emplace(b, node.seen_order.size());
    node.seen_order.push_back(b);
    node.pending.erase(b);

    EngineContext ctx(*this, n);
    strats_[n]->on_block(ctx, dag_.at(b));
    if (strats_[n]->relays()) gossip_block(n, b);

    if (cfg_.protocol == ProtocolKind::Ibft && is_validator(n) && !strats_[n]->inert() &&
        !cfg_.scripted_only) {
        const auto& payload = dag_.at(b).payload;
        if (payload.round >= nodes_[n].ibft.round && !payload.empty())
            ibft_enter_round(n, payload.round + 1);  // catch up via gossiped finalized block
        else
            ibft_progress(n);
    }

    // drain any orphan-pending children now that their parent is applied
    auto it = node.pending_children.find(b);
    if (it != node.pending_children.end()) {
        std::vector<BlockId> children = std::move(it->second);
        node.pending_children.erase(it);
        for (BlockId c : children) apply_block(n, c);
    }
}

void Simulation::handle_block_arrival(Event& e) {
    cur_->block = e.block;
    cur_->from = static_cast<std::int32_t>(e.from);
    if (e.heal) cur_->flags |= TraceEvent::kHeal;
    if (e.dropped) {
        cur_->flags |= TraceEvent::kDropped;
        return;
    }
    const NodeId n = e.node;
    auto& node = nodes_[n];
    if (strats_[n]->inert()) {
        cur_->flags |= TraceEvent::kInert;
        return;
    }
    if (node.sees(e.block) || node.pending.count(e.block)) {
        cur_->flags |= TraceEvent::kDuplicate;
        return;
    }
    if (cfg_.protocol == ProtocolKind::Ibft && !cfg_.scripted_only) {
        // gossiped IBFT blocks must carry commit-quorum evidence
        if (!protocol::ibft_payload_valid(dag_.at(e.block), cfg_.ibft)) {
            cur_->flags |= TraceEvent::kDropped;
            return;
        }
    }
    const auto& parent = dag_.at(e.block).parent;
    if (parent && !node.sees(*parent)) {
        node.pending.insert(e.block);
        node.pending_children[*parent].push_back(e.block);
        cur_->flags |= TraceEvent::kBuffered;
        return;
    }
    apply_block(n, e.block);
}

void Simulation::learn_tx(NodeId n, TxId tx) {
    auto& node = nodes_[n];
    node.known_txs.insert(tx);
    if (!node.included_txs.count(tx)) node.available_txs.emplace(-fee_of_.at(tx), tx);
}

void Simulation::handle_tx_created(Event& e) {
    const NodeId n = e.node;
    if (strats_[n]->inert()) {  // a crashed node submits nothing
        cur_->flags |= TraceEvent::kInert;
        return;
    }
    double fee;
    bool scripted = e.script_index != static_cast<std::size_t>(-1);
    if (scripted) {
        fee = cfg_.script[e.script_index].fee;
        cur_->flags |= TraceEvent::kScripted;
    } else {
        fee = cfg_.workload.fee.sample(workload_rng_[n]);
    }
    chain::Transaction tx;
    tx.id = next_tx_id_++;
    tx.created_at = now_;
    tx.fee = fee;
    tx.creator = n;
    fee_of_.emplace(tx.id, fee);
    transactions_.push_back(tx);
    cur_->tx = tx.id;
    cur_->has_tx = true;
    cur_->fee = fee;

    learn_tx(n, tx.id);
    if (strats_[n]->relays()) gossip_tx(n, tx.id);
    if (!scripted) {
        Event next;
        next.kind = EventKind::TxCreated;
        next.node = n;
        next.time = now_ + workload_rng_[n].exponential(1.0 / cfg_.workload.tx_rates[n]);
        schedule(next);
    }
}

void Simulation::handle_tx_arrival(Event& e) {
    cur_->tx = e.tx;
    cur_->has_tx = true;
    cur_->fee = fee_of_.at(e.tx);
    cur_->from = static_cast<std::int32_t>(e.from);
    if (e.dropped) {
        cur_->flags |= TraceEvent::kDropped;
        return;
    }
    const NodeId n = e.node;
    if (strats_[n]->inert()) {
        cur_->flags |= TraceEvent::kInert;
        return;
    }
    if (nodes_[n].known_txs.count(e.tx)) {
        cur_->flags |= TraceEvent::kDuplicate;
        return;
    }
    learn_tx(n, e.tx);
    if (strats_[n]->relays()) gossip_tx(n, e.tx);
}

// --- IBFT ---------------------------------------------------------------------

bool Simulation::ibft_insert_msg(NodeId n, const IbftMessage& msg) {
    auto& node = nodes_[n];
    auto [it, inserted] = node.msgs.insert(msg);
    if (inserted) node.tallies[{msg.round, msg.kind}][msg.block].insert(msg.key);
    return inserted;
}

std::size_t Simulation::ibft_tally(NodeId n, std::uint64_t round, IbftMsgKind kind, BlockId b) const {
    const auto& t = nodes_[n].tallies;
    auto it = t.find({round, kind});
    if (it == t.end()) return 0;
    auto jt = it->second.find(b);
    return jt == it->second.end() ? 0 : jt->second.size();
}

void Simulation::ibft_enter_round(NodeId n, std::uint64_t round) {
    auto& node = nodes_[n];
    auto& L = node.ibft;
    L.round = round;
    L.proposal = kNoBlock;
    L.sent_prepare = L.sent_commit = L.sent_round_change = false;
    ++L.timer_epoch;
    Event timeout;
    timeout.kind = EventKind::RoundTimeout;
    timeout.node = n;
    timeout.round = round;
    timeout.epoch = L.timer_epoch;
    timeout.time = now_ + cfg_.ibft.round_timeout;
    schedule(timeout);

    const KeyIndex proposer = protocol::ibft_proposer(round, cfg_.ibft);
    if (cfg_.ibft.key_holder[proposer] == n && strats_[n]->ibft_proposes()) {
        const BlockId b = build_block(n, node.head, 0.0, /*into_dag=*/false);
        send_ibft(n, IbftMessage{IbftMsgKind::Proposal, proposer, round, b});
    }
    ibft_progress(n);
}

void Simulation::ibft_progress(NodeId n) {
    auto& node = nodes_[n];
    auto& L = node.ibft;
    const std::uint32_t quorum = cfg_.ibft.effective_quorum();
    for (;;) {
        const std::uint64_t r = L.round;
        if (L.proposal == kNoBlock) {
            const KeyIndex proposer = protocol::ibft_proposer(r, cfg_.ibft);
            auto it = node.tallies.find({r, IbftMsgKind::Proposal});
            if (it != node.tallies.end()) {
                for (const auto& [blk, keys] : it->second) {
                    if (!keys.count(proposer)) continue;
                    auto cand = candidates_.find(blk);
                    // only prepare proposals extending our own head
                    if (cand == candidates_.end() || cand->second.parent != node.head) continue;
                    L.proposal = blk;
                    break;
                }
            }
        }
        bool progressed = false;
        if (L.proposal != kNoBlock && !L.sent_prepare) {
            L.sent_prepare = true;
            for (KeyIndex k : node.keys) send_ibft(n, IbftMessage{IbftMsgKind::Prepare, k, r, L.proposal});
            progressed = true;
        }
        if (L.proposal != kNoBlock && !L.sent_commit && strats_[n]->ibft_commits() &&
            ibft_tally(n, r, IbftMsgKind::Prepare, L.proposal) >= quorum) {
            L.sent_commit = true;
            for (KeyIndex k : node.keys) send_ibft(n, IbftMessage{IbftMsgKind::Commit, k, r, L.proposal});
            progressed = true;
        }
        if (L.proposal != kNoBlock && ibft_tally(n, r, IbftMsgKind::Commit, L.proposal) >= quorum) {
            ibft_finalize(n, r, L.proposal);
            continue;  // ibft_finalize entered round r+1
        }
        if (ibft_tally(n, r + 1, IbftMsgKind::RoundChange, kNoBlock) >= quorum) {
            ibft_enter_round(n, r + 1);
            return;  // enter_round already progressed
        }
        if (!progressed) return;
    }
}

void Simulation::ibft_finalize(NodeId n, std::uint64_t round, BlockId b) {
    if (!dag_.contains(b)) {
        auto it = candidates_.find(b);
        if (it == candidates_.end()) throw Error(errc::internal, "finalizing unknown candidate");
        chain::Block blk = it->second;
        blk.payload.round = round;
        blk.payload.proposer_key = protocol::ibft_proposer(round, cfg_.ibft);
        const auto& keys = nodes_[n].tallies[{round, IbftMsgKind::Commit}][b];
        blk.payload.commit_keys.assign(keys.begin(), keys.end());
        dag_.add_block(std::move(blk));
    }
    auto& node = nodes_[n];
    if (!node.sees(b)) {
        node.view.insert(b);
        node.seen_index.emplace(b, node.seen_order.size());
        node.seen_order.push_back(b);
    }
    consider_head(n, b);
    if (cur_) cur_->flags |= TraceEvent::kFinalized;
    gossip_block(n, b);  // let observers (and lagging validators) catch up
    ibft_enter_round(n, round + 1);
}

void Simulation::handle_msg_arrival(Event& e) {
    cur_->from = static_cast<std::int32_t>(e.from);
    cur_->msg_kind = static_cast<std::int8_t>(e.msg.kind);
    cur_->key = static_cast<std::int32_t>(e.msg.key);
    cur_->round = static_cast<std::int64_t>(e.msg.round);
    cur_->msg_block = e.msg.block;
    if (e.dropped) {
        cur_->flags |= TraceEvent::kDropped;
        return;
    }
    const NodeId n = e.node;
    if (strats_[n]->inert()) {
        cur_->flags |= TraceEvent::kInert;
        return;
    }
    if (!ibft_insert_msg(n, e.msg)) {
        cur_->flags |= TraceEvent::kDuplicate;
        return;
    }
    if (is_validator(n)) ibft_progress(n);
}

void Simulation::handle_round_timeout(Event& e) {
    const NodeId n = e.node;
    auto& L = nodes_[n].ibft;
    cur_->round = static_cast<std::int64_t>(e.round);
    if (strats_[n]->inert() || !is_validator(n)) {
        cur_->flags |= TraceEvent::kInert;
        return;
    }
    // re-arm so stalled nodes keep announcing the round change; receivers dedup
    ++L.timer_epoch;
    Event again;
    again.kind = EventKind::RoundTimeout;
    again.node = n;
    again.round = L.round;
    again.epoch = L.timer_epoch;
    again.time = now_ + cfg_.ibft.round_timeout;
    schedule(again);

    L.sent_round_change = true;
    for (KeyIndex k : nodes_[n].keys)
        send_ibft(n, IbftMessage{IbftMsgKind::RoundChange, k, L.round + 1, kNoBlock});
    ibft_progress(n);
}

void Simulation::handle_partition(Event& e) {
    const auto& w = cfg_.topology.partitions[e.partition_index];
    cur_->round = static_cast<std::int64_t>(e.partition_index);
    cur_->flags |= e.partition_start ? 0u : TraceEvent::kHeal;
    if (e.partition_start) return;

    // partition healed: neighbors exchange view diffs, one synthetic exchange
    // per healed edge and direction
    for (const auto& [a, b] : w.severed) {
        const int edge = edge_between_[a][b];
        if (edge < 0) continue;
        for (auto [src, dst] : {std::pair<NodeId, NodeId>{a, b}, std::pair<NodeId, NodeId>{b, a}}) {
            const double lat = cfg_.topology.edges[edge].latency.sample(latency_rng_);
            const double arrive = now_ + lat;
            const bool dropped = cfg_.topology.severed_during(edge, now_, arrive);
            for (BlockId blk : nodes_[src].view) {
                if (nodes_[dst].sees(blk)) continue;
                Event diff;
                diff.kind = EventKind::BlockArrival;
                diff.node = dst;
                diff.from = src;
                diff.block = blk;
                diff.heal = true;
                diff.time = arrive;
                diff.dropped = dropped;
                schedule(diff);
            }
        }
    }
}

void Simulation::handle_wake(Event& e) {
    const NodeId n = e.node;
    if (e.wake_tag == "publish_withheld") {
        cur_->flags |= TraceEvent::kScripted;
        auto withheld = std::move(nodes_[n].selfish.unpublished);
        nodes_[n].selfish.unpublished.clear();
        for (BlockId b : withheld) gossip_block(n, b);
        return;
    }
    EngineContext ctx(*this, n);
    strats_[n]->on_wake(ctx, e.wake_tag);
}

// --- snapshots & invariants ------------------------------------------------

SystemSnapshot Simulation::snapshot() const {
    SystemSnapshot s;
    s.time = now_;
    Fnv1a hash;
    hash.update(static_cast<std::uint64_t>(s.time * 1e9));
    for (const auto& node : nodes_) {
        NodeSnapshot ns;
        ns.view.assign(node.view.begin(), node.view.end());
        ns.head = node.head;
        ns.mempool_txs.reserve(node.available_txs.size());
        for (const auto& [negfee, tx] : node.available_txs) ns.mempool_txs.push_back(tx);
        std::sort(ns.mempool_txs.begin(), ns.mempool_txs.end());
        ns.n_protocol_msgs = node.msgs.size();
        ns.resources = node.resources.amounts;
        hash.update(ns.head);
        for (BlockId b : ns.view) hash.update(b);
        hash.update(static_cast<std::uint64_t>(ns.mempool_txs.size()));
        for (TxId t : ns.mempool_txs) hash.update(t);
        hash.update(static_cast<std::uint64_t>(ns.n_protocol_msgs));
        s.nodes.push_back(std::move(ns));
    }
    s.digest = hash.value();
    return s;
}

void Simulation::record_snapshot() {
    snapshots_.push_back(snapshot());
    if (!cur_) {
        TraceEvent rec;
        rec.t = now_;
        rec.seq = next_seq_++;
        rec.kind = EventKind::Snapshot;
        rec.snapshot = static_cast<std::int32_t>(snapshots_.size()) - 1;
        events_.push_back(rec);
    }
}

void Simulation::check_node_invariants(NodeId n) const {
    const auto& node = nodes_[n];
    if (!node.view.count(node.head)) throw Error(errc::internal, "head left the view");
    if (!node.view.count(kGenesisId)) throw Error(errc::internal, "genesis left the view");
}

// --- context ----------------------------------------------------------------

EngineContext::EngineContext(Simulation& sim, NodeId n) : sim_(sim), n_(n) {}
double EngineContext::now() const { return sim_.now_; }
const chain::BlockDag& EngineContext::dag() const { return sim_.dag_; }
NodeState& EngineContext::node() { return sim_.nodes_[n_]; }
const strategy::ScenarioView& EngineContext::config() const { return sim_.view_; }
Rng& EngineContext::rng() { return sim_.tie_rng_[n_]; }
double EngineContext::hash_fraction() const { return sim_.hash_fraction(n_); }
BlockId EngineContext::make_block(BlockId parent) {
    const double work =
        sim_.cfg_.protocol == ProtocolKind::Nakamoto ? sim_.cfg_.nakamoto.work_per_block : 0.0;
    return sim_.build_block(n_, parent, work, /*into_dag=*/true);
}
void EngineContext::publish_block(BlockId b) { sim_.gossip_block(n_, b); }
void EngineContext::set_head(BlockId b) { sim_.set_head(n_, b); }
bool EngineContext::consider_head(BlockId challenger) { return sim_.consider_head(n_, challenger); }
void EngineContext::schedule_mining() { sim_.schedule_mining(n_); }

Trace run_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    Simulation sim(cfg, seed);
    return sim.run();
}

}  // namespace presto::sim
