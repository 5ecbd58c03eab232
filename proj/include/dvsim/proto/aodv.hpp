#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "dvsim/behavior.hpp"

namespace dvsim {

// On-demand route discovery between routers.  Routes are built per
// destination by flooding route requests and unicasting replies back along
// recorded reverse paths; every route carries the destination's sequence
// number, and a route is only ever replaced by one with a newer sequence
// number, or an equally fresh one with fewer hops — the invariant that keeps
// next-hop chains loop-free.  Broken links raise route errors toward the
// precursors that were using them.  Liveness comes from per-tick hello
// beacons (params: hello_interval=1, allowed_loss=2, route_lifetime=100,
// rreq_retention=30).
class AodvBehavior : public ProtocolBehavior {
public:
  AodvBehavior(const Topology& topo, RouterIx self, const Params& p);

  void on_init(Context& ctx) override;
  void on_message(const Message& msg, InterfaceIx in_interface, RouterIx from_router,
                  Context& ctx) override;
  void on_timer(const std::string& tag, std::int64_t payload, Context& ctx) override;
  void on_adjacency(const AdjacencyEvent& ev, Context& ctx) override;
  void on_data(RouterIx dest, Context& ctx) override;
  void snapshot(std::vector<Row>& out) const override;
  std::string name() const override { return "aodv"; }

private:
  struct Route {
    std::uint32_t seq = 0;
    bool seq_known = false;
    std::int64_t hops = 0;
    std::int32_t next_hop = kNoRouter;
    bool valid = false;
    Tick expires_at = 0;
    std::set<RouterIx> precursors;
  };

  bool fresher(const Route& r, std::uint32_t seq, std::int64_t hops) const;
  void maybe_install(RouterIx dest, std::uint32_t seq, std::int64_t hops, RouterIx via,
                     Tick now);
  void handle_rreq(const AodvRreq& q, InterfaceIx in_if, RouterIx from, Context& ctx);
  void handle_rrep(const AodvRrep& p, RouterIx from, Context& ctx);
  void handle_rerr(const AodvRerr& e, RouterIx from, Context& ctx);
  void handle_data(const DataPacket& d, RouterIx from, Context& ctx);
  void break_link_to(RouterIx neighbor, Context& ctx);
  void flood_rreq(RouterIx dest, Context& ctx);
  void send_rerr(const std::map<RouterIx, std::vector<AodvRerrEntry>>& per_precursor,
                 Context& ctx);

  const Topology& topo_;
  RouterIx self_;
  Tick hello_interval_;
  Tick allowed_loss_;
  Tick route_lifetime_;
  Tick rreq_retention_;

  std::uint32_t own_seq_ = 0;
  std::uint32_t rreq_id_ = 0;
  std::uint32_t hello_seq_ = 0;
  std::map<RouterIx, Route> routes_;
  std::map<RouterIx, Tick> last_heard_;
  std::map<std::pair<RouterIx, std::uint32_t>, Tick> seen_rreq_; // -> expiry
  std::set<RouterIx> pending_data_; // destinations awaiting discovery
  std::uint64_t data_id_ = 0;
  Tick now_ = 0; // mirrors the tick timer for sweep bookkeeping
};

std::unique_ptr<ProtocolBehavior> make_aodv(const Topology& topo, RouterIx self,
                                            const Params& p);

} // namespace dvsim
