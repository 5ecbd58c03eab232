#include "dvsim/proto/aodv.hpp"

#include <algorithm>

namespace dvsim {

AodvBehavior::AodvBehavior(const Topology& topo, RouterIx self, const Params& p)
    : topo_(topo), self_(self),
      hello_interval_(p.get_int("hello_interval", 1)),
      allowed_loss_(p.get_int("allowed_loss", 2)),
      route_lifetime_(p.get_int("route_lifetime", 100)),
      rreq_retention_(p.get_int("rreq_retention", 30)) {
  if (hello_interval_ < 1) throw std::invalid_argument("hello_interval must be >= 1");
  if (allowed_loss_ < 1) throw std::invalid_argument("allowed_loss must be >= 1");
}

void AodvBehavior::on_init(Context& ctx) {
  ctx.arm_timer(hello_interval_, "tick");
}

// Install rule: only a strictly fresher (seq, -hops) pair may replace a valid
// route; anything beats an invalid or unknown one.
bool AodvBehavior::fresher(const Route& r, std::uint32_t seq, std::int64_t hops) const {
  if (!r.valid) return !r.seq_known || seq32_ge(seq, r.seq);
  if (!r.seq_known) return true;
  if (seq32_gt(seq, r.seq)) return true;
  return seq == r.seq && hops < r.hops;
}

void AodvBehavior::maybe_install(RouterIx dest, std::uint32_t seq, std::int64_t hops,
                                 RouterIx via, Tick now) {
  Route& r = routes_[dest];
  if (!fresher(r, seq, hops)) return;
  r.seq = seq;
  r.seq_known = true;
  r.hops = hops;
  r.next_hop = static_cast<std::int32_t>(via);
  r.valid = true;
  r.expires_at = now + route_lifetime_;
}

void AodvBehavior::flood_rreq(RouterIx dest, Context& ctx) {
  ++own_seq_; // a fresh origin seq keeps reverse routes to us loop-free
  ++rreq_id_;
  AodvRreq q;
  q.origin = self_;
  q.rreq_id = rreq_id_;
  q.dest = dest;
  auto it = routes_.find(dest);
  q.dest_seq_known = it != routes_.end() && it->second.seq_known;
  q.dest_seq = q.dest_seq_known ? it->second.seq : 0;
  q.origin_seq = own_seq_;
  q.hop_count = 0;
  seen_rreq_[{self_, rreq_id_}] = ctx.now() + rreq_retention_;
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (topo_.subnet_effectively_up(s)) ctx.broadcast(s, q);
  }
  ctx.annotate("rreq originate dest=" + topo_.router_names[dest] +
               " id=" + std::to_string(rreq_id_));
}

void AodvBehavior::handle_rreq(const AodvRreq& q, InterfaceIx in_if, RouterIx from,
                               Context& ctx) {
  auto key = std::make_pair(q.origin, q.rreq_id);
  if (seen_rreq_.count(key)) return;
  seen_rreq_[key] = ctx.now() + rreq_retention_;
  if (q.origin != self_) maybe_install(q.origin, q.origin_seq, q.hop_count + 1, from, ctx.now());

  if (q.dest == self_) {
    // The requester may hold a bumped (stale-invalidation) seq: answer with a
    // number that beats everything it has ever seen.
    if (q.dest_seq_known) {
      if (seq32_gt(q.dest_seq, own_seq_)) own_seq_ = q.dest_seq;
      if (q.dest_seq == own_seq_) ++own_seq_;
    }
    AodvRrep p;
    p.dest = self_;
    p.dest_seq = own_seq_;
    p.hop_count = 0;
    p.origin = q.origin;
    ctx.unicast_any(from, p);
    return;
  }

  auto it = routes_.find(q.dest);
  bool can_answer = it != routes_.end() && it->second.valid && it->second.seq_known &&
                    (!q.dest_seq_known || seq32_ge(it->second.seq, q.dest_seq));
  if (can_answer) {
    AodvRrep p;
    p.dest = q.dest;
    p.dest_seq = it->second.seq;
    p.hop_count = it->second.hops;
    p.origin = q.origin;
    it->second.precursors.insert(from);
    ctx.unicast_any(from, p);
    return;
  }

  AodvRreq fwd = q;
  fwd.hop_count += 1;
  if (it != routes_.end() && it->second.seq_known &&
      (!fwd.dest_seq_known || seq32_gt(it->second.seq, fwd.dest_seq))) {
    fwd.dest_seq = it->second.seq;
    fwd.dest_seq_known = true;
  }
  SubnetIx in_subnet = topo_.interface_subnet[in_if];
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (s == in_subnet || !topo_.subnet_effectively_up(s)) continue;
    ctx.broadcast(s, fwd);
  }
}

void AodvBehavior::handle_rrep(const AodvRrep& p, RouterIx from, Context& ctx) {
  if (p.dest != self_) maybe_install(p.dest, p.dest_seq, p.hop_count + 1, from, ctx.now());
  if (p.origin == self_) {
    if (pending_data_.erase(p.dest)) {
      auto it = routes_.find(p.dest);
      if (it != routes_.end() && it->second.valid) {
        DataPacket d{self_, p.dest, ++data_id_, 64};
        it->second.expires_at = ctx.now() + route_lifetime_;
        ctx.unicast_any(static_cast<RouterIx>(it->second.next_hop), d);
        ctx.annotate("data sent dest=" + topo_.router_names[p.dest] +
                     " id=" + std::to_string(data_id_));
      }
    }
    return;
  }
  auto rev = routes_.find(p.origin);
  if (rev == routes_.end() || !rev->second.valid) return; // reverse path expired
  AodvRrep fwd = p;
  fwd.hop_count += 1;
  rev->second.expires_at = ctx.now() + route_lifetime_;
  auto fwdroute = routes_.find(p.dest);
  if (fwdroute != routes_.end())
    fwdroute->second.precursors.insert(static_cast<RouterIx>(rev->second.next_hop));
  ctx.unicast_any(static_cast<RouterIx>(rev->second.next_hop), fwd);
}

void AodvBehavior::send_rerr(const std::map<RouterIx, std::vector<AodvRerrEntry>>& per_precursor,
                             Context& ctx) {
  for (const auto& [to, entries] : per_precursor) {
    AodvRerr e;
    e.unreachable = entries;
    ctx.unicast_any(to, e);
  }
}

void AodvBehavior::handle_rerr(const AodvRerr& e, RouterIx from, Context& ctx) {
  std::map<RouterIx, std::vector<AodvRerrEntry>> fanout;
  for (const AodvRerrEntry& u : e.unreachable) {
    auto it = routes_.find(u.dest);
    if (it == routes_.end() || !it->second.valid) continue;
    if (it->second.next_hop != static_cast<std::int32_t>(from)) continue;
    Route& r = it->second;
    r.valid = false;
    r.next_hop = kNoRouter;
    if (!r.seq_known || seq32_gt(u.dest_seq, r.seq)) r.seq = u.dest_seq;
    for (RouterIx pre : r.precursors) fanout[pre].push_back({u.dest, r.seq});
    r.precursors.clear();
  }
  send_rerr(fanout, ctx);
}

void AodvBehavior::handle_data(const DataPacket& d, RouterIx from, Context& ctx) {
  if (d.dest == self_) {
    ctx.annotate("data delivered from=" + topo_.router_names[d.src] +
                 " id=" + std::to_string(d.id));
    return;
  }
  if (d.ttl <= 1) return;
  auto it = routes_.find(d.dest);
  if (it == routes_.end() || !it->second.valid) {
    std::uint32_t seq = 0;
    if (it != routes_.end() && it->second.seq_known) seq = it->second.seq + 1;
    AodvRerr e;
    e.unreachable.push_back({d.dest, seq});
    ctx.unicast_any(from, e);
    return;
  }
  DataPacket fwd = d;
  fwd.ttl -= 1;
  it->second.expires_at = ctx.now() + route_lifetime_;
  it->second.precursors.insert(from);
  ctx.unicast_any(static_cast<RouterIx>(it->second.next_hop), fwd);
}

void AodvBehavior::break_link_to(RouterIx neighbor, Context& ctx) {
  last_heard_.erase(neighbor);
  std::map<RouterIx, std::vector<AodvRerrEntry>> fanout;
  for (auto& [dest, r] : routes_) {
    if (!r.valid || r.next_hop != static_cast<std::int32_t>(neighbor)) continue;
    r.valid = false;
    r.next_hop = kNoRouter;
    r.seq += 1; // the loss invalidates everything we knew at the old seq
    r.seq_known = true;
    for (RouterIx pre : r.precursors) fanout[pre].push_back({dest, r.seq});
    r.precursors.clear();
    ctx.annotate("route broken dest=" + topo_.router_names[dest]);
  }
  send_rerr(fanout, ctx);
}

void AodvBehavior::on_message(const Message& msg, InterfaceIx in_interface,
                              RouterIx from_router, Context& ctx) {
  last_heard_[from_router] = ctx.now();
  if (const auto* q = std::get_if<AodvRreq>(&msg)) return handle_rreq(*q, in_interface, from_router, ctx);
  if (const auto* p = std::get_if<AodvRrep>(&msg)) return handle_rrep(*p, from_router, ctx);
  if (const auto* e = std::get_if<AodvRerr>(&msg)) return handle_rerr(*e, from_router, ctx);
  if (const auto* d = std::get_if<DataPacket>(&msg)) return handle_data(*d, from_router, ctx);
  // Hellos only refresh last_heard_, done above.
}

void AodvBehavior::on_timer(const std::string& tag, std::int64_t, Context& ctx) {
  if (tag != "tick") return;
  now_ = ctx.now();
  ctx.arm_timer(hello_interval_, "tick");

  AodvHello h{++hello_seq_};
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (topo_.subnet_effectively_up(s)) ctx.broadcast(s, h);
  }

  // Hello-based liveness: neighbors quiet past the allowance are gone.
  std::vector<RouterIx> lost;
  for (auto& [n, t] : last_heard_)
    if (now_ - t > allowed_loss_ * hello_interval_) lost.push_back(n);
  for (RouterIx n : lost) break_link_to(n, ctx);

  // Route expiry: stale routes lapse without an error burst.
  for (auto& [dest, r] : routes_) {
    if (r.valid && now_ >= r.expires_at) {
      r.valid = false;
      r.next_hop = kNoRouter;
      r.seq += 1;
      r.seq_known = true;
      r.precursors.clear();
    }
  }
  for (auto it = seen_rreq_.begin(); it != seen_rreq_.end();) {
    if (it->second <= now_) it = seen_rreq_.erase(it);
    else ++it;
  }
}

void AodvBehavior::on_adjacency(const AdjacencyEvent& ev, Context& ctx) {
  for (RouterIx n : ev.lost_neighbors) {
    // Only a full loss severs the neighbor; a surviving shared subnet keeps it.
    bool still_adjacent = false;
    for (const auto& [r, s] : topo_.neighbors(self_)) {
      (void)s;
      if (r == n) {
        still_adjacent = true;
        break;
      }
    }
    if (!still_adjacent) break_link_to(n, ctx);
  }
}

void AodvBehavior::on_data(RouterIx dest, Context& ctx) {
  if (dest == self_) return;
  auto it = routes_.find(dest);
  if (it != routes_.end() && it->second.valid) {
    DataPacket d{self_, dest, ++data_id_, 64};
    it->second.expires_at = ctx.now() + route_lifetime_;
    ctx.unicast_any(static_cast<RouterIx>(it->second.next_hop), d);
    ctx.annotate("data sent dest=" + topo_.router_names[dest] +
                 " id=" + std::to_string(data_id_));
    return;
  }
  pending_data_.insert(dest);
  flood_rreq(dest, ctx);
}

void AodvBehavior::snapshot(std::vector<Row>& out) const {
  for (const auto& [dest, r] : routes_) {
    Row row;
    row.dest_kind = Row::DestKind::Router;
    row.dest = dest;
    row.metric = r.valid ? r.hops : kMetricInf;
    row.next_hop = r.valid ? r.next_hop : kNoRouter;
    row.valid = r.valid;
    row.seq = r.seq;
    row.state = r.valid ? '-' : 'I';
    out.push_back(row);
  }
}

std::unique_ptr<ProtocolBehavior> make_aodv(const Topology& topo, RouterIx self,
                                            const Params& p) {
  return std::make_unique<AodvBehavior>(topo, self, p);
}

} // namespace dvsim
