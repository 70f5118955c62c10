#pragma once

#include <cstdint>

namespace routesim {

// Node identifiers are small non-negative integers assigned by the scenario
// parser in order of first appearance.  Interface identifiers are local to a
// node and index into its ordered attachment list.
using NodeId = std::int32_t;
using InterfaceId = std::int32_t;

// Route metrics and link weights.  Stored as signed 64-bit so that protocol
// metrics (EIGRP composites reach the hundreds of thousands) and the
// graph layer's micro-unit weights share one representation.
using Cost = std::int64_t;

// Simulation time in microseconds since the start of the run.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerSecond = 1'000'000;

// Destination address used by layer-2 frames that every station on a
// segment should receive.
inline constexpr NodeId kBroadcast = -1;

}  // namespace routesim
