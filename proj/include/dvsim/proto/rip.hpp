#pragma once

#include <map>
#include <memory>
#include <set>

#include "dvsim/behavior.hpp"

namespace dvsim {

// Distance-vector hop-count routing over subnets, metric 16 = unreachable.
// Mitigations are individually switchable:
//   split_horizon     - omit routes on the subnet they were learned through
//   poisoned_reverse  - advertise them there with metric 16 instead
//   triggered_updates - broadcast changed entries immediately (default on)
//   hold_down         - freeze a destination for N ticks after it is lost;
//                       hold_on_local / hold_on_receive pick the triggers
//   sync              - round mode: no timers, full-table broadcast per round
// update_interval sets the periodic timer (default 30); periodics are
// staggered by router index so ties never depend on map ordering.
class RipBehavior : public ProtocolBehavior {
public:
  RipBehavior(const Topology& topo, RouterIx self, const Params& p);

  void on_init(Context& ctx) override;
  void on_message(const Message& msg, InterfaceIx in_interface, RouterIx from_router,
                  Context& ctx) override;
  void on_timer(const std::string& tag, std::int64_t payload, Context& ctx) override;
  void on_adjacency(const AdjacencyEvent& ev, Context& ctx) override;
  void on_round(Context& ctx) override;
  void snapshot(std::vector<Row>& out) const override;
  std::string name() const override { return "rip"; }

protected:
  struct Route {
    std::int64_t metric = kRipInfinity;
    std::int32_t next_hop = kNoRouter; // kLocal for attached subnets
    SubnetIx via_subnet = 0;           // subnet the route goes out through
    Tick hold_until = -1;              // >= 0 while the destination is frozen
  };

  // Mitigation hooks, called on every received entry / before any switch to a
  // different next hop.  The base class accepts everything.
  virtual void observe_update(SubnetIx dest, std::int64_t wire_metric,
                              InterfaceIx in_if, RouterIx from, Context& ctx);
  virtual bool allow_switch(SubnetIx dest, std::int64_t wire_metric,
                            InterfaceIx in_if, RouterIx from, Context& ctx);
  // Lets subclasses tag rows (suspect markers etc.).
  virtual char row_state(SubnetIx dest, const Route& r) const;
  // Lets subclasses withhold destinations from advertisements entirely.
  virtual bool advertise_dest(SubnetIx dest) const;

  void process_entry(SubnetIx dest, std::int64_t wire, InterfaceIx in_if,
                     RouterIx from, Context& ctx);
  virtual void install(SubnetIx dest, std::int64_t metric, std::int32_t next_hop,
                       SubnetIx via_subnet);
  virtual void invalidate(SubnetIx dest, bool local_trigger, Context& ctx);
  void advertise(Context& ctx, bool triggered, const std::set<SubnetIx>* only);
  void flush_changes(Context& ctx);

  const Topology& topo_;
  RouterIx self_;

  Tick update_interval_;
  bool split_horizon_;
  bool poisoned_reverse_;
  bool triggered_updates_;
  Tick hold_down_;
  bool hold_on_local_;
  bool hold_on_receive_;
  bool sync_;

  std::map<SubnetIx, Route> routes_;
  std::set<SubnetIx> changed_; // dirty destinations awaiting a triggered update
};

std::unique_ptr<ProtocolBehavior> make_rip(const Topology& topo, RouterIx self,
                                           const Params& p);

} // namespace dvsim
