// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/chain.hpp"

#include <algorithm>

namespace presto::chain {

void BlockDag::add_block(Block b) {
    if (entries_.count(b.id))
        throw Error(errc::duplicate_id, "block " + std::to_string(b.id) + " already present");
    Entry e;
    if (!b.parent.has_value()) {
        if (!entries_.empty())
            throw Error(errc::missing_parent, "only the genesis of an empty dag may lack a parent");
        if (b.id != kGenesisId)
            throw Error(errc::config_invalid, "genesis must carry the reserved id 0");
        e.height = 0;
        e.cum_work = b.work;
    } else {
        auto it = entries_.find(*b.parent);
        if (it == entries_.end())
            throw Error(errc::missing_parent,
                        "parent " + std::to_string(*b.parent) + " of block " + std::to_string(b.id) + " not in dag");
        e.height = it->second.height + 1;
        e.cum_work = it->second.cum_work + b.work;
    }
    e.block = std::move(b);
    entries_.emplace(e.block.id, std::move(e));
}

Chain BlockDag::chain_of(BlockId b) const {
    Chain out;
    const Entry* cur = &entry(b);
    out.reserve(cur->height + 1);
    for (;;) {
        out.push_back(cur->block.id);
        if (!cur->block.parent) break;
        cur = &entry(*cur->block.parent);
    }
    return out;
}

bool BlockDag::is_ancestor(BlockId a, BlockId b) const {
    const Entry* ea = &entry(a);
    const Entry* eb = &entry(b);
    if (ea->height > eb->height) return false;
    // climb b down to a's height, then compare
    while (eb->height > ea->height) eb = &entry(*eb->block.parent);
    return eb->block.id == a;
}

BlockId BlockDag::common_prefix(BlockId a, BlockId b) const {
    const Entry* ea = &entry(a);
    const Entry* eb = &entry(b);
    while (ea->height > eb->height) ea = &entry(*ea->block.parent);
    while (eb->height > ea->height) eb = &entry(*eb->block.parent);
    while (ea->block.id != eb->block.id) {
        ea = &entry(*ea->block.parent);
        eb = &entry(*eb->block.parent);
    }
    return ea->block.id;
}

std::vector<BlockId> BlockDag::path_down_to(BlockId b, BlockId stop) const {
    std::vector<BlockId> out;
    const Entry* cur = &entry(b);
    while (cur->block.id != stop) {
        out.push_back(cur->block.id);
        if (!cur->block.parent)
            throw Error(errc::internal, "path_down_to: stop block not on chain");
        cur = &entry(*cur->block.parent);
    }
    return out;
}

std::vector<BlockId> BlockDag::all_ids_sorted() const {
    std::vector<BlockId> ids;
    ids.reserve(entries_.size());
    for (const auto& [id, _] : entries_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace presto::chain
