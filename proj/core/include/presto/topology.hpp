// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "presto/rng.hpp"
#include "presto/types.hpp"

namespace presto::sim {

struct LatencyModel {
    enum class Kind { Deterministic, Exponential } kind = Kind::Deterministic;
    double value = 1.0;  // fixed delay, or mean for Exponential

    double sample(Rng& rng) const {
        return kind == Kind::Deterministic ? value : rng.exponential(value);
    }
};

struct EdgeSpec {
    NodeId a = 0, b = 0;
    LatencyModel latency;
};

/// Edges removed during [start, end).
struct PartitionWindow {
    double start = 0, end = 0;
    std::vector<std::pair<NodeId, NodeId>> severed;
};

struct Topology {
    std::vector<EdgeSpec> edges;
    std::vector<PartitionWindow> partitions;

    /// A message crossing edge `e` during [t_send, t_arrive] is dropped if any
    /// partition window severing that edge overlaps the transit interval.
    bool severed_during(std::size_t edge_idx, double t_send, double t_arrive) const {
        const auto& e = edges[edge_idx];
        for (const auto& w : partitions) {
            if (t_arrive <= w.start || t_send >= w.end) continue;
            for (const auto& [x, y] : w.severed)
                if ((x == e.a && y == e.b) || (x == e.b && y == e.a)) return true;
        }
        return false;
    }

    std::vector<std::vector<std::pair<NodeId, std::size_t>>> adjacency(std::size_t n_nodes) const {
        std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(n_nodes);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            adj[edges[i].a].emplace_back(edges[i].b, i);
            adj[edges[i].b].emplace_back(edges[i].a, i);
        }
        return adj;
    }

    bool connected(std::size_t n_nodes) const;
};

}  // namespace presto::sim
