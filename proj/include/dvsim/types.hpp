#pragma once

#include <cstdint>
#include <limits>

namespace dvsim {

using Tick = std::int64_t;

using RouterIx = std::uint32_t;
using SubnetIx = std::uint32_t;
using InterfaceIx = std::uint32_t;

// Sentinel next-hop values used in routing rows.
inline constexpr std::int32_t kNoRouter = -1; // no route / unreachable
inline constexpr std::int32_t kLocal = -2;    // directly attached / self

// RIP-family unreachability metric.
inline constexpr std::int64_t kRipInfinity = 16;

// Generic additive-metric infinity (oracle, Babel, AODV hop counts).
inline constexpr std::int64_t kMetricInf = std::numeric_limits<std::int64_t>::max();

// Composite-metric infinity (EIGRP).
inline constexpr std::uint64_t kCompositeInf = std::numeric_limits<std::uint64_t>::max();

// Serial number arithmetic (RFC 1982 style): a is newer than b iff the signed
// difference is positive.  Wrap-around safe.
inline bool seq32_gt(std::uint32_t a, std::uint32_t b) {
  return static_cast<std::int32_t>(a - b) > 0;
}
inline bool seq32_ge(std::uint32_t a, std::uint32_t b) {
  return a == b || seq32_gt(a, b);
}
inline std::uint32_t seq32_max(std::uint32_t a, std::uint32_t b) {
  return seq32_gt(a, b) ? a : b;
}
inline bool seq16_gt(std::uint16_t a, std::uint16_t b) {
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(a - b)) > 0;
}

} // namespace dvsim
