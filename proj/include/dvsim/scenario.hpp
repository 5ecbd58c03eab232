#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dvsim/behavior.hpp"
#include "dvsim/engine.hpp"
#include "dvsim/messages.hpp"
#include "dvsim/topology.hpp"

namespace dvsim {

// A scenario file describes a topology, an event script, per-subnet channel
// and cost attributes, and free-form protocol parameters:
//
//   [routers]
//   A = a_ab a_ac
//   [subnets]
//   s_ab = a_ab b_ab latency=2 loss=0.1 bw=100 delay=10 load=0 rel=255 cost=1
//   [events]
//   31 link s_ab down
//   36 link s_ab up
//   40 router A down
//   55 send A C
//   60 latency s_ab 3
//   70 loss s_ab 0.25
//   [params]
//   update_interval = 30
//
// '#' and ';' start comments. Interface tokens in [subnets] lines are bare
// names; attributes carry '='.
struct Scenario {
  Topology topo;
  std::vector<ScriptEvent> script;
  Params params;
  std::vector<Tick> latency;           // per subnet, default 1
  std::vector<double> loss;            // per subnet, default 0
  std::vector<DualVector> cost;        // per subnet, default bw=100 delay=10
  std::vector<std::int64_t> link_cost; // per subnet, default 1 (hop-count protocols)
};

Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path); // throws std::runtime_error on I/O failure

// Applies per-subnet latency/loss to an engine built from the scenario.
void configure_engine(Engine& eng, const Scenario& sc);

// Behavior factory for a protocol name (rip, rip-mti, aodv, eigrp, babel,
// rip-tree), wired with the scenario's parameters and per-subnet costs.  The
// seed feeds protocol-internal randomness (Babel's request-loss channel);
// topology always comes from the engine's own copy at construction time.
BehaviorFactory make_factory(const std::string& protocol, const Scenario& sc,
                             std::uint64_t seed);

} // namespace dvsim
