#pragma once

#include <string>

#include "dvsim/scenario.hpp"

namespace dvsim {

// Deterministic randomized scenario for invariant sweeps: a connected
// topology of 4–20 routers (random spanning tree plus extra links and 1–3
// single-homed stub subnets), 1–5 link flaps in ticks [40,150] where roughly
// half the links come back, per-subnet vector costs for the composite-metric
// protocol, and a handful of data sends for the on-demand one.  The same seed
// always yields the same scenario; the protocol name only influences the
// protocol-specific extras, never the topology.
Scenario make_corpus_scenario(const std::string& protocol, std::uint64_t seed);

struct RunResult {
  Trace trace;
  Topology final_topo; // engine's topology after the script ran
};

// Convenience runner: engine + factory wiring for one scenario.
RunResult run_scenario(const Scenario& sc, const std::string& protocol, Mode mode,
                       Tick horizon, std::uint64_t seed);

} // namespace dvsim
