#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dvsim/behavior.hpp"
#include "dvsim/topology.hpp"
#include "dvsim/types.hpp"

namespace dvsim {

// External happenings injected into a run, ordered by tick.  Events at the
// same tick apply in script order before anything else scheduled there.
struct ScriptEvent {
  enum class Kind { LinkUp, LinkDown, RouterUp, RouterDown, DataSend, Latency, Loss };
  Tick at = 0;
  Kind kind = Kind::LinkDown;
  std::uint32_t a = 0; // subnet (link/latency/loss) or router (router/data src)
  std::uint32_t b = 0; // data dest
  double x = 0.0;      // latency ticks or loss probability
};

enum class Mode {
  Async, // event-driven: deliveries and timers happen when scheduled
  Sync,  // round-based: per tick, deliver everything, then poll each router
};

// Per-tick table snapshots plus traffic accounting.  to_csv() is the
// determinism surface: equal seeds must give byte-identical output.
struct Trace {
  std::vector<std::vector<std::vector<Row>>> snapshots; // [tick][router][rows]
  std::map<std::string, std::uint64_t> sent_by_kind;
  std::uint64_t messages_sent = 0;
  std::uint64_t dropped_link_down = 0;
  std::uint64_t dropped_loss = 0;
  std::uint64_t dropped_dead_router = 0;
  std::vector<std::string> event_log; // "tick|router|note"

  std::string to_csv(const Topology& topo) const;
};

class Engine {
public:
  explicit Engine(Topology topo) : topo_(std::move(topo)) { topo_.validate(); }

  // Fixed per-subnet delivery latency in ticks; must be >= 1 so every message
  // observes causality (state read at send tick, applied strictly later).
  void set_subnet_latency(SubnetIx s, Tick latency);
  // Per-subnet independent drop probability in [0, 1], applied per copy.
  void set_subnet_loss(SubnetIx s, double p);

  Trace run(const BehaviorFactory& make, const std::vector<ScriptEvent>& script,
            Mode mode, Tick horizon, std::uint64_t seed);

  const Topology& topo() const { return topo_; }
  // Topology as the last run left it (script events applied); equals topo()
  // before any run.
  const Topology& last_topo() const { return last_topo_.num_routers() ? last_topo_ : topo_; }

private:
  Topology topo_;
  Topology last_topo_;
  std::vector<Tick> latency_;   // sized on first run
  std::vector<double> loss_;
};

} // namespace dvsim
