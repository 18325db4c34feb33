// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#include "presto/analysis.hpp"

#include <cmath>
#include <limits>

#include "presto/utility.hpp"

namespace presto::analysis {

namespace {

double utility_of(const Trace& trace, NodeId n, const UtilityModel& model, UtilityBasis basis) {
    return basis == UtilityBasis::Absolute ? strategy::estimate_utility(trace, n, model)
                                           : strategy::relative_revenue(trace, n, model);
}

}  // namespace

IncentiveReport incentive_check(const ScenarioConfig& scenario, NodeId n, const std::string& strategy_id,
                                const UtilityModel& model, std::span<const std::uint64_t> seeds,
                                UtilityBasis basis, double tolerance) {
    if (seeds.empty()) throw Error(errc::config_invalid, "incentive_check needs at least one seed");
    if (n >= scenario.n_nodes) throw Error(errc::config_invalid, "node out of range");

    ScenarioConfig profile_d = scenario;
    profile_d.strategies.clear();
    ScenarioConfig profile_ns = profile_d;
    if (strategy_id != "honest") profile_ns.strategies[n] = strategy_id;
    profile_ns.validate();

    std::vector<double> deltas, v_d, v_ns;
    for (std::uint64_t seed : seeds) {
        const Trace td = sim::run_scenario(profile_d, seed);
        // common random numbers: the deviant profile reuses the same seed
        const Trace tn = sim::run_scenario(profile_ns, seed);
        v_d.push_back(utility_of(td, n, model, basis));
        v_ns.push_back(utility_of(tn, n, model, basis));
        deltas.push_back(v_ns.back() - v_d.back());
    }
    IncentiveReport rep;
    rep.basis = basis;
    rep.v_default = stats::mean(v_d);
    rep.v_deviant = stats::mean(v_ns);
    rep.delta = stats::mean(deltas);
    rep.delta_stderr = stats::std_error(deltas);
    rep.compatible = rep.delta <= tolerance;
    return rep;
}

bool perfect_decentralization_check(const ScenarioConfig& scenario, NodeId n, NodeId m,
                                    const UtilityModel& model, std::span<const std::uint64_t> seeds,
                                    double tolerance) {
    if (n == m) throw Error(errc::config_invalid, "perfect decentralization requires two distinct nodes");
    if (n >= scenario.n_nodes || m >= scenario.n_nodes)
        throw Error(errc::config_invalid, "node out of range");
    if (seeds.empty()) throw Error(errc::config_invalid, "needs at least one seed");

    ScenarioConfig separate = scenario;
    separate.strategies.clear();

    ScenarioConfig merged = separate;
    for (std::size_t k = 0; k < merged.resource_kinds.size(); ++k) {
        merged.node_resources[n].amounts[k] += merged.node_resources[m].amounts[k];
        merged.node_resources[m].amounts[k] = 0;
    }
    if (merged.protocol == protocol::ProtocolKind::Ibft)
        for (auto& holder : merged.ibft.key_holder)
            if (holder == m) holder = n;
    merged.validate();

    std::vector<double> sum_separate, merged_v;
    for (std::uint64_t seed : seeds) {
        const Trace ts = sim::run_scenario(separate, seed);
        const Trace tm = sim::run_scenario(merged, seed);
        sum_separate.push_back(utility_of(ts, n, model, UtilityBasis::Absolute) +
                               utility_of(ts, m, model, UtilityBasis::Absolute));
        merged_v.push_back(utility_of(tm, n, model, UtilityBasis::Absolute));
    }
    return stats::mean(sum_separate) >= stats::mean(merged_v) - tolerance;
}

GriefingReport griefing_factor(const Trace& trace_default, const Trace& trace_deviant, NodeId attacker,
                               const UtilityModel& model, double tolerance) {
    const auto& sd = trace_default.node_strategies;
    const auto& sn = trace_deviant.node_strategies;
    if (sd == sn) throw Error(errc::identical_profiles, "traces share one strategy profile");

    const std::uint32_t n_nodes = trace_default.scenario.n_nodes;
    GriefingReport rep;
    rep.victim_loss.assign(n_nodes, 0.0);
    rep.gf.assign(n_nodes, 0.0);
    const double inf = std::numeric_limits<double>::infinity();

    rep.attacker_loss = strategy::estimate_utility(trace_default, attacker, model) -
                        strategy::estimate_utility(trace_deviant, attacker, model);
    rep.attacker_lost = rep.attacker_loss > tolerance;
    double victims_total = 0;
    for (NodeId v = 0; v < n_nodes; ++v) {
        if (v == attacker) continue;
        const double loss = strategy::estimate_utility(trace_default, v, model) -
                            strategy::estimate_utility(trace_deviant, v, model);
        rep.victim_loss[v] = loss;
        victims_total += loss;
        if (rep.attacker_lost)
            rep.gf[v] = loss / rep.attacker_loss;
        else
            rep.gf[v] = loss > tolerance ? inf : 0.0;
    }
    if (rep.attacker_lost)
        rep.ngf = victims_total / rep.attacker_loss;
    else
        rep.ngf = victims_total > tolerance ? inf : 0.0;
    return rep;
}

ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis_pointer, double value) {
    nlohmann::json doc = base.to_json();
    try {
        nlohmann::json::json_pointer ptr(axis_pointer);
        if (!doc.contains(ptr)) throw Error(errc::config_invalid, "axis '" + axis_pointer + "' not in scenario");
        // integer-valued knobs stay integers so validation keeps working
        if (doc[ptr].is_number_integer())
            doc[ptr] = static_cast<std::int64_t>(std::llround(value));
        else
            doc[ptr] = value;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::config_invalid, std::string("bad axis pointer: ") + e.what());
    }
    if (axis_pointer == "/ibft/k" && base.protocol == protocol::ProtocolKind::Ibft) {
        // sweeping the validator count: a default-derived key assignment and
        // its authority resources are regenerated for the new k
        bool dense = base.ibft.key_holder.size() == base.ibft.k;
        for (std::size_t i = 0; dense && i < base.ibft.key_holder.size(); ++i)
            dense = base.ibft.key_holder[i] == i % base.n_nodes;
        std::vector<sim::ResourceVector> derived(base.n_nodes,
                                                 sim::ResourceVector{std::vector<double>(base.resource_kinds.size(), 1.0)});
        for (auto& rv : derived) rv.amounts[base.consensus_resource] = 0;
        for (NodeId h : base.ibft.key_holder) derived[h].amounts[base.consensus_resource] += 1;
        bool derived_resources = true;
        for (NodeId n = 0; n < base.n_nodes; ++n)
            derived_resources &= base.node_resources[n].amounts == derived[n].amounts;
        if (dense) {
            doc["ibft"].erase("keys");
            if (derived_resources) doc.erase("node_resources");
        }
    }
    return ScenarioConfig::from_json(doc);
}

SweepResult scalability_sweep(const ScenarioConfig& base, const std::string& axis_pointer,
                              std::span<const double> values, std::span<const std::uint64_t> seeds,
                              const MeasureFn& measure, bool positive_measure) {
    if (values.size() < 3)
        throw Error(errc::config_invalid, "scalability verdicts need at least 3 scale points");
    if (seeds.empty()) throw Error(errc::config_invalid, "needs at least one seed");

    SweepResult result;
    for (double v : values) {
        const ScenarioConfig cfg = apply_axis(base, axis_pointer, v);
        SweepPoint point;
        point.axis_value = v;
        for (std::uint64_t seed : seeds) point.per_seed.push_back(measure(sim::run_scenario(cfg, seed)));
        point.mean = stats::mean(point.per_seed);
        point.std_error = stats::std_error(point.per_seed);
        result.points.push_back(std::move(point));
    }
    // strict monotonicity with a 2-sigma significance guard, so sampling noise
    // on a flat curve cannot masquerade as scale effects
    result.scalable = true;
    for (std::size_t i = 0; i + 1 < result.points.size(); ++i) {
        const auto& p = result.points[i];
        const auto& q = result.points[i + 1];
        const double sigma = std::sqrt(p.std_error * p.std_error + q.std_error * q.std_error);
        const double gain = positive_measure ? q.mean - p.mean : p.mean - q.mean;
        if (!(gain > 2.0 * sigma)) result.scalable = false;
    }
    return result;
}

}  // namespace presto::analysis
