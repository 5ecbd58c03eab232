#pragma once

#include <map>
#include <memory>
#include <random>
#include <tuple>
#include <vector>

#include "dvsim/behavior.hpp"

namespace dvsim {

// Sequenced-distance vectors: destinations are routers (route originators),
// distances are (seqno, metric) pairs ordered lexicographically with newer
// seqnos ranking smaller.  A received entry is feasible only if it is
// strictly smaller than the feasibility distance — the best distance this
// router has ever advertised for that originator — which makes any path that
// loops back through this router inadmissible.  When every remaining entry is
// infeasible but some neighbor still claims a route (starvation), the router
// asks the originator for a fresh seqno: a request is forwarded hop-by-hop
// toward the originator (along even-infeasible routes), retried a bounded
// number of times, and deduplicated at each hop.  The originator bumps its
// own seqno and re-advertises, which re-validates the surviving paths.
// Request transmissions can additionally be dropped by a seeded loss channel
// (request_loss) to model the protocol's behaviour under lossy signalling.
class BabelBehavior : public ProtocolBehavior {
public:
  BabelBehavior(const Topology& topo, RouterIx self, const Params& p,
                std::vector<std::int64_t> link_cost, std::uint64_t seed);

  void on_init(Context& ctx) override;
  void on_message(const Message& msg, InterfaceIx in_interface, RouterIx from_router,
                  Context& ctx) override;
  void on_timer(const std::string& tag, std::int64_t payload, Context& ctx) override;
  void on_adjacency(const AdjacencyEvent& ev, Context& ctx) override;
  void snapshot(std::vector<Row>& out) const override;
  std::string name() const override { return "babel"; }

private:
  struct NeighborAdv {
    std::uint32_t seqno = 0;
    std::int64_t metric = kMetricInf; // as advertised (before our link cost)
    std::int64_t total = kMetricInf;  // metric + receiving link cost
  };
  struct Selected {
    RouterIx neighbor = 0;
    std::uint32_t seqno = 0;
    std::int64_t total = kMetricInf;
  };
  struct Fd {
    std::uint32_t seqno = 0;
    std::int64_t metric = kMetricInf;
  };
  struct Pending {
    std::uint32_t seqno = 0; // requested (target) seqno
    int attempts = 0;
    Tick next_at = 0;
  };

  bool feasible(RouterIx source, const NeighborAdv& e) const;
  void advertise_one(RouterIx source, Context& ctx);
  void advertise_all(Context& ctx);
  void reselect(RouterIx source, Context& ctx);
  void send_request(RouterIx source, Pending& pend, Context& ctx);
  bool roll_request_loss(); // true = this transmission is dropped
  std::pair<std::uint32_t, std::int64_t> advertised_pair(RouterIx source) const;

  const Topology& topo_;
  RouterIx self_;
  std::int64_t interval_;
  std::int64_t retry_spacing_;
  int max_attempts_;
  std::int64_t request_hops_;
  std::int64_t retention_;
  double request_loss_;
  std::uint32_t own_seqno_;
  std::vector<std::int64_t> cost_; // per subnet
  std::mt19937_64 rng_;
  Tick now_ = 0;

  std::map<RouterIx, std::map<RouterIx, NeighborAdv>> adv_; // source -> neighbor -> entry
  std::map<RouterIx, Selected> selected_;
  std::map<RouterIx, Fd> fd_;
  std::map<RouterIx, Pending> pending_;
  // (requester, source, seqno, attempt) -> forget-at tick
  std::map<std::tuple<RouterIx, RouterIx, std::uint32_t, std::uint32_t>, Tick> seen_req_;
};

std::unique_ptr<ProtocolBehavior> make_babel(const Topology& topo, RouterIx self,
                                             const Params& p,
                                             std::vector<std::int64_t> link_cost,
                                             std::uint64_t seed);

} // namespace dvsim
