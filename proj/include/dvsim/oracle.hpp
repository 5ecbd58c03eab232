#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dvsim/behavior.hpp"
#include "dvsim/eigrp_metric.hpp"
#include "dvsim/engine.hpp"
#include "dvsim/topology.hpp"
#include "dvsim/types.hpp"

namespace dvsim {

// Hop-count shortest paths over the live topology (dead routers and
// effectively-down subnets excluded). router_dist is in router hops
// (self = 0); subnet_dist is in routing-table units (attached = 0).
struct ShortestPaths {
  std::vector<std::vector<std::int64_t>> router_dist; // [router][router]
  std::vector<std::vector<std::int64_t>> subnet_dist; // [router][subnet]
};

ShortestPaths shortest_paths(const Topology& topo);
ShortestPaths shortest_paths_parallel(const Topology& topo);

// Largest finite subnet distance across all alive routers: the network
// "diameter" bound for synchronous convergence.
std::int64_t rip_diameter(const ShortestPaths& sp);

// Synchronous Bellman-Ford, k rounds from the cold-start state (attached
// subnets at 0, everything else unreachable). Metrics cap at kRipInfinity.
// Tie-break mirrors the engine's synchronous delivery order: each round every
// router offers its previous-round table; a router switches next hop only on a
// strict improvement, taking the lowest-index neighbor that achieves it.
struct BfTable {
  std::vector<std::vector<std::int64_t>> metric;  // [router][subnet]
  std::vector<std::vector<std::int32_t>> next_hop; // [router][subnet], kNoRouter/kLocal
};

BfTable bf_k_rounds(const Topology& topo, int rounds);

// Composite-metric fixpoint: per-router best path vector to every subnet given
// each subnet's link cost vector. Paths longer than hop_cap are unreachable.
struct EigrpOracle {
  std::vector<std::vector<DualVector>> vec;        // [router][subnet]
  std::vector<std::vector<std::uint64_t>> metric;  // [router][subnet], kCompositeInf
};

EigrpOracle eigrp_fixpoint(const Topology& topo, const std::vector<DualVector>& subnet_cost,
                           const KValues& k, std::int64_t hop_cap = 100);
EigrpOracle eigrp_fixpoint_parallel(const Topology& topo, const std::vector<DualVector>& subnet_cost,
                                    const KValues& k, std::int64_t hop_cap = 100);

// --- Trace forensics ----------------------------------------------------------

// A forwarding cycle present in one tick's snapshot for one destination.
struct CycleRecord {
  Tick tick = 0;
  Row::DestKind kind = Row::DestKind::Subnet;
  std::uint32_t dest = 0;
  std::vector<RouterIx> participants; // sorted

  friend bool operator==(const CycleRecord&, const CycleRecord&) = default;
};

std::vector<CycleRecord> find_cycles(const Trace& trace);
std::vector<CycleRecord> find_cycles_parallel(const Trace& trace);

// Maximal runs of consecutive ticks during which a destination has at least
// one cycle; participants accumulate over the run.
struct Episode {
  Tick start = 0;
  Tick end = 0; // inclusive
  Row::DestKind kind = Row::DestKind::Subnet;
  std::uint32_t dest = 0;
  std::set<RouterIx> participants;
};

std::vector<Episode> assemble_episodes(const std::vector<CycleRecord>& cycles);

// Smallest tick T such that `settled` holds for every snapshot from T through
// the end of the trace; -1 if it does not hold at the final tick.
Tick convergence_tick(const Trace& trace,
                      const std::function<bool(const std::vector<std::vector<Row>>&)>& settled);

// Minimal simple-loop metric for every ordered interface pair (out, in) of one
// router: the cheapest loop that leaves through `out`, never re-enters the
// origin mid-path, and returns through `in`. Pairs without any simple loop are
// absent. Metrics are path hops; search is bounded by max_metric.
std::map<std::pair<InterfaceIx, InterfaceIx>, std::int64_t>
enumerate_simple_loop_minima(const Topology& topo, RouterIx origin, std::int64_t max_metric = 16);

// --- Per-protocol trace invariants ---------------------------------------------

struct Violation {
  Tick tick = 0;
  RouterIx router = 0;
  std::uint32_t dest = 0;
  std::string what;
};

// Along every valid next-hop edge u->v for a router destination, v's entry
// (when valid) must carry a strictly newer seq, or the same seq with a
// strictly smaller hop count.
std::vector<Violation> check_aodv_monotonicity(const Trace& trace);

// Passive valid rows: recorded reported distance of the successor (aux) must
// stay strictly below the own feasible distance (fd); successor + feasible
// successor count (seq) never exceeds 4.
std::vector<Violation> check_eigrp_invariants(const Trace& trace, std::size_t max_successors = 4);

// Per (router, source) the feasibility distance (aux = seqno, fd = metric)
// must never worsen from one tick to the next.
std::vector<Violation> check_babel_invariants(const Trace& trace);

} // namespace dvsim
