#pragma once

#include <cstdint>
#include <stdexcept>

#include "dvsim/messages.hpp"
#include "dvsim/types.hpp"

namespace dvsim {

// Weights for the composite metric. K5 == 0 disables the reliability factor.
struct KValues {
  std::uint32_t k1 = 1;
  std::uint32_t k2 = 0;
  std::uint32_t k3 = 1;
  std::uint32_t k4 = 0;
  std::uint32_t k5 = 0;
};

// Scalar metric of a path vector:
//   [(K1*BW + K2*BW/(256-Load) + K3*Delay) * K5/(K4+Rel)] * 256
// where BW is already the scaled inverse-bandwidth term. K5 == 0 makes the
// trailing factor 1. Integer arithmetic throughout.
inline std::uint64_t composite_metric(const DualVector& v, const KValues& k) {
  if (v.unreachable) return kCompositeInf;
  if (v.load >= 256) throw std::domain_error("composite_metric: load must be < 256");
  std::uint64_t base = std::uint64_t{k.k1} * v.bandwidth + std::uint64_t{k.k3} * v.delay;
  if (k.k2 != 0) base += (std::uint64_t{k.k2} * v.bandwidth) / (256 - v.load);
  if (k.k5 != 0) {
    std::uint64_t div = std::uint64_t{k.k4} + v.reliability;
    if (div == 0) throw std::domain_error("composite_metric: K4 + reliability is zero");
    base = (base * k.k5) / div;
  }
  return base * 256;
}

// Extend a neighbor-advertised path vector across the incoming link:
// inverse-bandwidth term is the path max, delay accumulates, load is the path
// max, reliability the path min, hop count grows by one.
inline DualVector compose_over_link(const DualVector& link, const DualVector& path) {
  DualVector out;
  out.unreachable = link.unreachable || path.unreachable;
  if (out.unreachable) return out;
  out.bandwidth = link.bandwidth > path.bandwidth ? link.bandwidth : path.bandwidth;
  out.delay = link.delay + path.delay;
  out.load = link.load > path.load ? link.load : path.load;
  out.reliability = link.reliability < path.reliability ? link.reliability : path.reliability;
  out.hops = path.hops + 1;
  return out;
}

} // namespace dvsim
