// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>

namespace presto {

using BlockId = std::uint64_t;  // assigned by a global monotone counter; genesis is 0
using TxId = std::uint64_t;
using NodeId = std::uint32_t;   // dense 0..N-1 within a scenario
using KeyIndex = std::uint32_t;

inline constexpr BlockId kGenesisId = 0;
inline constexpr BlockId kNoBlock = static_cast<BlockId>(-1);

}  // namespace presto
