// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "presto/errors.hpp"

namespace presto::strategy {

// ---------------------------------------------------------------------------
// default (follow-the-protocol) strategy d

void Strategy::init(Context& ctx) {
    if (ctx.config().protocol != protocol::ProtocolKind::Nakamoto) return;  // IBFT init is engine-driven
    if (ctx.config().scripted_only) return;
    if (ctx.hash_fraction() > 0) ctx.schedule_mining();
}

void Strategy::on_mining_success(Context& ctx) {
    // mine on head, publish immediately, keep mining
    const BlockId b = ctx.make_block(ctx.node().head);
    ctx.consider_head(b);
    ctx.publish_block(b);
    ctx.schedule_mining();
}

void Strategy::on_block(Context& ctx, const chain::Block& b) {
    if (ctx.consider_head(b.id)) ctx.schedule_mining();
}

namespace {

class Honest final : public Strategy {
  public:
    const char* id() const override { return "honest"; }
};

class Crashed final : public Strategy {
  public:
    const char* id() const override { return "crashed"; }
    bool inert() const override { return true; }
    bool relays() const override { return false; }
    bool ibft_proposes() const override { return false; }
    bool ibft_commits() const override { return false; }
    void init(Context&) override {}
    void on_mining_success(Context&) override {}
    void on_block(Context&, const chain::Block&) override {}
};

/// Mines and votes normally but never publishes its own mined blocks and
/// never emits Commit messages. IBFT proposals still go out: the harm is the
/// missing vote, not a silent proposer slot.
class Withhold final : public Strategy {
  public:
    const char* id() const override { return "withhold"; }
    bool ibft_commits() const override { return false; }

    void on_mining_success(Context& ctx) override {
        const BlockId b = ctx.make_block(ctx.node().head);
        ctx.consider_head(b);
        ctx.schedule_mining();  // no publish
    }
};

/// Lead-based block withholding (private chain racing the public one).
/// State lives in NodeState::selfish: the best published tip, the queue of
/// withheld own blocks, and whether a tie race is in progress.
class Selfish final : public Strategy {
  public:
    const char* id() const override { return "selfish"; }

    void on_mining_success(Context& ctx) override {
        auto& sl = ctx.node().selfish;
        const BlockId b = ctx.make_block(ctx.node().head);  // extend the private tip
        ctx.set_head(b);
        if (sl.race && sl.unpublished.empty()) {
            // we won the tie race: reveal immediately and take both blocks
            ctx.publish_block(b);
            sl.public_tip = b;
            sl.race = false;
        } else {
            sl.unpublished.push_back(b);
        }
        ctx.schedule_mining();
    }

    void on_block(Context& ctx, const chain::Block& b) override {
        auto& sl = ctx.node().selfish;
        const auto& dag = ctx.dag();
        const double w_new = dag.cumulative_work(b.id);
        if (w_new <= dag.cumulative_work(sl.public_tip)) return;  // stale or tied public block
        sl.public_tip = b.id;

        const double w_priv = dag.cumulative_work(ctx.node().head);
        const double per_block = ctx.config().nakamoto->work_per_block;
        const long lead_after = std::lround((w_priv - w_new) / per_block);

        if (lead_after < 0) {
            // the public chain overtook us: adopt and restart
            sl.unpublished.clear();
            sl.race = false;
            ctx.set_head(b.id);
            ctx.schedule_mining();
        } else if (lead_after == 0) {
            // they caught up to our single hidden block: reveal it, race begins
            for (BlockId u : sl.unpublished) ctx.publish_block(u);
            sl.unpublished.clear();
            sl.race = true;
        } else if (lead_after == 1) {
            // lead was two: reveal everything and orphan their block
            for (BlockId u : sl.unpublished) ctx.publish_block(u);
            sl.unpublished.clear();
            sl.race = false;
            sl.public_tip = ctx.node().head;
        } else {
            // comfortable lead: reveal only the oldest hidden block
            if (!sl.unpublished.empty()) {
                ctx.publish_block(sl.unpublished.front());
                sl.unpublished.erase(sl.unpublished.begin());
            }
        }
    }
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(const std::string& id) {
    if (id == "honest") return std::make_unique<Honest>();
    if (id == "crashed") return std::make_unique<Crashed>();
    if (id == "withhold") return std::make_unique<Withhold>();
    if (id == "selfish") return std::make_unique<Selfish>();
    throw Error(errc::config_invalid, "unknown strategy '" + id + "'");
}

}  // namespace presto::strategy
