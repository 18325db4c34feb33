// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <stdexcept>
#include <string>

namespace presto {

enum class errc {
    duplicate_id,
    missing_parent,
    unknown_block,
    time_in_past,
    empty_view,
    zero_total_resource,
    zero_hash_power,
    config_invalid,
    empty_trace,
    zero_rewards,
    division_by_zero,
    identical_profiles,
    too_many_nodes,
    no_finalized_blocks,
    horizon_too_short,
    internal,
};

const char* errc_name(errc e);

/// Exception carrying one of the contract error codes above.
class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

  private:
    errc code_;
};

inline const char* errc_name(errc e) {
    switch (e) {
    case errc::duplicate_id: return "DuplicateId";
    case errc::missing_parent: return "MissingParent";
    case errc::unknown_block: return "UnknownBlock";
    case errc::time_in_past: return "TimeInPast";
    case errc::empty_view: return "EmptyView";
    case errc::zero_total_resource: return "ZeroTotalResource";
    case errc::zero_hash_power: return "ZeroHashPower";
    case errc::config_invalid: return "ConfigInvalid";
    case errc::empty_trace: return "EmptyTrace";
    case errc::zero_rewards: return "ZeroRewards";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::identical_profiles: return "IdenticalProfiles";
    case errc::too_many_nodes: return "TooManyNodes";
    case errc::no_finalized_blocks: return "NoFinalizedBlocks";
    case errc::horizon_too_short: return "HorizonTooShort";
    case errc::internal: return "InternalError";
    }
    return "UnknownError";
}

}  // namespace presto
