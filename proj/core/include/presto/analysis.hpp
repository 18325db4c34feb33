// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "presto/engine.hpp"
#include "presto/metrics.hpp"
#include "presto/scenario.hpp"
#include "presto/stats.hpp"

namespace presto::analysis {

using sim::ScenarioConfig;
using sim::Trace;
using sim::UtilityModel;

/// How node utilities are compared across strategy profiles. Absolute is the
/// raw tokens/second estimator; Relative is the share of distributed rewards
/// (the selfish-mining revenue measure, equal to post-retargeting absolute
/// revenue for proof of work).
enum class UtilityBasis { Absolute, Relative };

struct IncentiveReport {
    double v_default = 0;       // v_n(D), averaged over seeds
    double v_deviant = 0;       // v_n(D_{n,s})
    double delta = 0;           // v_deviant - v_default
    double delta_stderr = 0;
    bool compatible = true;     // delta <= tolerance
    UtilityBasis basis = UtilityBasis::Absolute;
};

/// Runs paired simulations of profile D (everyone honest) and D_{n,s} with
/// common random numbers (the same seed drives both runs of a pair).
/// Errors: ConfigInvalid.
IncentiveReport incentive_check(const ScenarioConfig& scenario, NodeId n, const std::string& strategy_id,
                                const UtilityModel& model, std::span<const std::uint64_t> seeds,
                                UtilityBasis basis = UtilityBasis::Absolute, double tolerance = 1e-3);

/// Simulates X and X_{nm} (nodes n and m merged, resources combined, all
/// honest) and tests whether staying separate is at least as good:
/// v_n(X) + v_m(X) >= v_n(X_{nm}) - tolerance.
/// Errors: ConfigInvalid when n == m.
bool perfect_decentralization_check(const ScenarioConfig& scenario, NodeId n, NodeId m,
                                    const UtilityModel& model, std::span<const std::uint64_t> seeds,
                                    double tolerance = 1e-3);

struct GriefingReport {
    double attacker_loss = 0;              // v_n(D) - v_n(D_{n,s})
    std::vector<double> victim_loss;       // per node; attacker entry is 0
    std::vector<double> gf;                // per victim; +inf encoded as infinity()
    double ngf = 0;
    bool attacker_lost = false;            // attacker_loss > tolerance
};

/// GF(n,m) = victim loss / attacker loss when the attacker actually loses;
/// infinity when victims lose but the attacker does not; 0 when nobody does.
/// Errors: IdenticalProfiles when the two traces share one strategy profile.
GriefingReport griefing_factor(const Trace& trace_default, const Trace& trace_deviant, NodeId attacker,
                               const UtilityModel& model, double tolerance = 1e-6);

using MeasureFn = std::function<double(const Trace&)>;

struct SweepPoint {
    double axis_value = 0;
    std::vector<double> per_seed;
    double mean = 0;
    double std_error = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    bool scalable = false;  // strictly monotone in the direction of the measure
};

/// Overwrites `axis_pointer` (a JSON pointer into the scenario document) with
/// each value, re-validates, runs all seeds, and applies the scalability
/// verdict for a positive (or negative) performance measure.
/// Errors: ConfigInvalid for a bad axis or fewer than 3 values.
SweepResult scalability_sweep(const ScenarioConfig& base, const std::string& axis_pointer,
                              std::span<const double> values, std::span<const std::uint64_t> seeds,
                              const MeasureFn& measure, bool positive_measure = true);

/// Applies one axis value to a scenario via JSON pointer. Shared by the sweep
/// driver and the CLI. Errors: ConfigInvalid.
ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis_pointer, double value);

}  // namespace presto::analysis
