#pragma once
// Internal seed salts: auxiliary random streams (jump events, bridge
// refinement) are decoupled from each path's primary Brownian stream by
// XOR-ing the master seed with a fixed constant, keeping every stream a pure
// function of (master seed, path index). Shared by the analysis pipeline and
// the CLI so identical configurations draw identical events.

#include <cstdint>

namespace disdrift {

inline constexpr std::uint64_t kJumpSeedSalt = 0x9d1f2c3b4a596877ULL;
inline constexpr std::uint64_t kBridgeSeedSalt = 0x5e21d0c4b3a29188ULL;

}  // namespace disdrift
