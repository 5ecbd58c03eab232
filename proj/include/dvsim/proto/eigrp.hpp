#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "dvsim/behavior.hpp"
#include "dvsim/eigrp_metric.hpp"

namespace dvsim {

// Diffusing-update distance vectors.  Every router keeps, per destination
// subnet, the path vector each neighbor last reported; the route (successor)
// is chosen only among neighbors whose reported composite distance lies
// strictly below the feasible distance — the historical minimum since the
// destination last returned to passive state.  When that set empties the
// router freezes its distance, floods queries, and only recomputes (resetting
// the feasible distance) once every neighbor has replied.  Queries received
// while active are answered with the frozen distance; passive receivers
// answer with their recomputed one.  Two rules keep the network loop-free at
// every instant.  First, a query arriving from the router's own successor
// while it is (or thereby becomes) active is answered only when the diffusing
// computation completes, so the successor can never act on a distance that
// still routes through it.  Second, a neighbor that has sent us a query is in
// doubt for that destination — its recorded vector is a frozen mid-diffusion
// value, possibly derived from our own pre-failure advertisement — and is
// excluded from successor selection until its end-of-diffusion update
// arrives.  Per-subnet FIFO delivery guarantees the query precedes any frozen
// reply from the same neighbor, so a stale reply can never be installed.
// Updates are event-driven; there is no periodic timer.  At most four
// (successor + feasible successor) entries are retained per destination.
class EigrpBehavior : public ProtocolBehavior {
public:
  EigrpBehavior(const Topology& topo, RouterIx self, const Params& p,
                std::vector<DualVector> subnet_cost);

  void on_init(Context& ctx) override;
  void on_message(const Message& msg, InterfaceIx in_interface, RouterIx from_router,
                  Context& ctx) override;
  void on_timer(const std::string& tag, std::int64_t payload, Context& ctx) override;
  void on_adjacency(const AdjacencyEvent& ev, Context& ctx) override;
  void snapshot(std::vector<Row>& out) const override;
  std::string name() const override { return "eigrp"; }

private:
  struct DestState {
    std::map<RouterIx, DualVector> reported; // neighbor -> advertised vector
    std::int32_t successor = kNoRouter;      // kLocal when attached wins
    DualVector best;                         // current distance vector
    std::uint64_t d = kCompositeInf;
    std::uint64_t fd = kCompositeInf;
    std::uint64_t successor_rd = kCompositeInf; // composite of successor's report
    std::size_t fs_count = 0;                // successor + feasible successors kept
    bool active = false;
    std::set<RouterIx> pending_replies;
    DualVector frozen;
    std::uint64_t frozen_d = kCompositeInf;
    // Query from our own successor while diffusing: the reply is withheld
    // until this computation finishes, so the successor can never act on a
    // distance that still routes through it.
    std::int32_t held_reply = kNoRouter;
  };

  bool attached_up(SubnetIx dest) const;
  DualVector attached_vec(SubnetIx dest) const;
  std::uint64_t reported_composite(const DualVector& v) const;
  // Best composed vector via one neighbor over all shared live subnets.
  bool compose_via(RouterIx n, const DualVector& reported, DualVector& out,
                   std::uint64_t& out_metric) const;
  void recompute_passive(SubnetIx dest, Context& ctx);
  void transition_to_passive(SubnetIx dest, Context& ctx);
  void go_active(SubnetIx dest, Context& ctx);
  void advertise(SubnetIx dest, Context& ctx);
  void advertise_full(SubnetIx subnet, Context& ctx);
  DualVector advertised_vec(const DestState& st) const;
  void reply_to(RouterIx n, SubnetIx dest, Context& ctx);

  const Topology& topo_;
  RouterIx self_;
  KValues k_;
  std::int64_t hop_cap_;
  std::vector<DualVector> cost_; // per subnet
  std::map<SubnetIx, DestState> dests_;
  // Neighbors mid-diffusion per destination (their query seen, their
  // concluding update not yet): ineligible as successor until they
  // re-advertise.  Kept outside DestState so the mark survives the route
  // entry being dropped and recreated while the neighbor is still active.
  std::map<SubnetIx, std::set<RouterIx>> doubt_;
};

std::unique_ptr<ProtocolBehavior> make_eigrp(const Topology& topo, RouterIx self,
                                             const Params& p,
                                             std::vector<DualVector> subnet_cost);

} // namespace dvsim
