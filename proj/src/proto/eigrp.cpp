#include "dvsim/proto/eigrp.hpp"

#include <algorithm>

namespace dvsim {

EigrpBehavior::EigrpBehavior(const Topology& topo, RouterIx self, const Params& p,
                             std::vector<DualVector> subnet_cost)
    : topo_(topo), self_(self), hop_cap_(p.get_int("hop_cap", 100)),
      cost_(std::move(subnet_cost)) {
  k_.k1 = static_cast<std::uint32_t>(p.get_int("k1", 1));
  k_.k2 = static_cast<std::uint32_t>(p.get_int("k2", 0));
  k_.k3 = static_cast<std::uint32_t>(p.get_int("k3", 1));
  k_.k4 = static_cast<std::uint32_t>(p.get_int("k4", 0));
  k_.k5 = static_cast<std::uint32_t>(p.get_int("k5", 0));
  if (cost_.size() != topo_.num_subnets())
    throw std::invalid_argument("eigrp: one cost vector per subnet required");
  if (hop_cap_ < 1) throw std::invalid_argument("hop_cap must be >= 1");
}

bool EigrpBehavior::attached_up(SubnetIx dest) const {
  return topo_.attached(self_, dest) && topo_.subnet_effectively_up(dest);
}

DualVector EigrpBehavior::attached_vec(SubnetIx dest) const {
  DualVector v = cost_[dest];
  v.hops = 0;
  v.unreachable = false;
  return v;
}

std::uint64_t EigrpBehavior::reported_composite(const DualVector& v) const {
  return composite_metric(v, k_);
}

bool EigrpBehavior::compose_via(RouterIx n, const DualVector& reported, DualVector& out,
                                std::uint64_t& out_metric) const {
  if (reported.unreachable) return false;
  bool found = false;
  for (const auto& [nb, via] : topo_.neighbors(self_)) {
    if (nb != n) continue;
    DualVector cand = compose_over_link(cost_[via], reported);
    if (cand.hops > hop_cap_) continue;
    std::uint64_t m = composite_metric(cand, k_);
    if (!found || m < out_metric) {
      out = cand;
      out_metric = m;
      found = true;
    }
  }
  return found;
}

DualVector EigrpBehavior::advertised_vec(const DestState& st) const {
  DualVector v = st.active ? st.frozen : st.best;
  std::uint64_t m = st.active ? st.frozen_d : st.d;
  if (m == kCompositeInf || v.hops > hop_cap_) {
    DualVector u;
    u.unreachable = true;
    return u;
  }
  return v;
}

void EigrpBehavior::advertise(SubnetIx dest, Context& ctx) {
  DualUpdate up{dest, advertised_vec(dests_.at(dest))};
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (topo_.subnet_effectively_up(s)) ctx.broadcast(s, up);
  }
}

// Full-table broadcast for a (re)gained adjacency.  Active destinations are
// deliberately skipped: their only advertisable value is the frozen one, and
// sending it as an update would let the new neighbor install a mid-diffusion
// distance with no doubt mark guarding it.  They are covered by the query
// extension in on_adjacency instead.
void EigrpBehavior::advertise_full(SubnetIx subnet, Context& ctx) {
  if (!topo_.subnet_effectively_up(subnet)) return;
  for (const auto& [dest, st] : dests_)
    if (!st.active) ctx.broadcast(subnet, DualUpdate{dest, advertised_vec(st)});
}

void EigrpBehavior::reply_to(RouterIx n, SubnetIx dest, Context& ctx) {
  ctx.unicast_any(n, DualReply{dest, advertised_vec(dests_.at(dest))});
}

// Passive-state selection: pick the best path among the attached link and all
// neighbors passing the feasibility gate (reported composite < FD).  The gate
// is what makes an installed route provably loop-free: anyone closer than our
// historical best cannot be routing through us.  When the gate leaves only
// choices worse than the plain minimum over all (settled) neighbors, the
// router diffuses instead of committing: the transition resets FD, so the
// better path becomes adoptable without ever bypassing the gate.
void EigrpBehavior::recompute_passive(SubnetIx dest, Context& ctx) {
  DestState& st = dests_[dest];
  std::int32_t old_succ = st.successor;
  std::uint64_t old_d = st.d;

  std::int32_t succ = kNoRouter;
  DualVector best;
  std::uint64_t best_m = kCompositeInf;
  std::uint64_t succ_rd = kCompositeInf;
  std::size_t feasible = 0;
  std::uint64_t unrestricted_m = kCompositeInf;

  if (attached_up(dest)) {
    best = attached_vec(dest);
    best_m = composite_metric(best, k_);
    succ = kLocal;
    succ_rd = 0;
    feasible = 1;
    unrestricted_m = best_m;
  }
  const std::set<RouterIx>* dq = nullptr;
  if (auto dit = doubt_.find(dest); dit != doubt_.end()) dq = &dit->second;
  for (const auto& [n, rep] : st.reported) {
    if (rep.unreachable) continue;
    if (dq && dq->count(n)) continue; // mid-diffusion, value is frozen/stale
    DualVector cand;
    std::uint64_t m = kCompositeInf;
    if (!compose_via(n, rep, cand, m)) continue;
    unrestricted_m = std::min(unrestricted_m, m);
    std::uint64_t rd = reported_composite(rep);
    if (rd >= st.fd) continue; // fails the feasibility gate
    ++feasible;
    if (m < best_m) {
      best = cand;
      best_m = m;
      succ = static_cast<std::int32_t>(n);
      succ_rd = rd;
    }
  }

  if ((succ == kNoRouter && old_d != kCompositeInf) || unrestricted_m < best_m) {
    go_active(dest, ctx);
    return;
  }

  st.successor = succ;
  st.best = best;
  st.d = best_m;
  st.successor_rd = succ_rd;
  st.fs_count = std::min<std::size_t>(feasible, 4);
  if (best_m < st.fd) st.fd = best_m;
  if (st.successor != old_succ || st.d != old_d) advertise(dest, ctx);
  if (st.d == kCompositeInf) dests_.erase(dest); // never knew a finite route
}

// End of a diffusing computation: every neighbor answered.  The feasibility
// gate resets — FD becomes the fresh distance — and the result is advertised.
void EigrpBehavior::transition_to_passive(SubnetIx dest, Context& ctx) {
  DestState& st = dests_[dest];
  st.active = false;
  st.pending_replies.clear();
  std::int32_t held = st.held_reply;
  st.held_reply = kNoRouter;

  std::int32_t succ = kNoRouter;
  DualVector best;
  std::uint64_t best_m = kCompositeInf;
  std::uint64_t succ_rd = kCompositeInf;
  std::size_t feasible = 0;

  if (attached_up(dest)) {
    best = attached_vec(dest);
    best_m = composite_metric(best, k_);
    succ = kLocal;
    succ_rd = 0;
    feasible = 1;
  }
  const std::set<RouterIx>* dq = nullptr;
  if (auto dit = doubt_.find(dest); dit != doubt_.end()) dq = &dit->second;
  for (const auto& [n, rep] : st.reported) {
    if (rep.unreachable) continue;
    if (dq && dq->count(n)) continue; // mid-diffusion, value is frozen/stale
    DualVector cand;
    std::uint64_t m = kCompositeInf;
    if (!compose_via(n, rep, cand, m)) continue;
    ++feasible;
    if (m < best_m) {
      best = cand;
      best_m = m;
      succ = static_cast<std::int32_t>(n);
      succ_rd = reported_composite(rep);
    }
  }

  st.successor = succ;
  st.best = best;
  st.d = best_m;
  st.fd = best_m; // reset: a new passive era begins
  st.successor_rd = succ_rd;
  st.fs_count = std::min<std::size_t>(feasible, 4);
  advertise(dest, ctx);
  if (held >= 0)
    ctx.unicast_any(static_cast<RouterIx>(held), DualReply{dest, advertised_vec(st)});
  if (st.d == kCompositeInf) {
    ctx.annotate("dual unreachable dest=" + topo_.subnet_names[dest]);
    dests_.erase(dest); // passive at infinity: drop the table entry
  }
}

void EigrpBehavior::go_active(SubnetIx dest, Context& ctx) {
  DestState& st = dests_[dest];
  st.active = true;
  // Distance through the (lost or worsened) successor, recomputed; queries
  // carry it so neighbors learn how bad things look from here.
  DualVector frozen;
  frozen.unreachable = true;
  std::uint64_t frozen_m = kCompositeInf;
  if (st.successor == kLocal && attached_up(dest)) {
    frozen = attached_vec(dest);
    frozen_m = composite_metric(frozen, k_);
  } else if (st.successor >= 0) {
    auto it = st.reported.find(static_cast<RouterIx>(st.successor));
    if (it != st.reported.end()) {
      DualVector cand;
      std::uint64_t m = kCompositeInf;
      if (compose_via(static_cast<RouterIx>(st.successor), it->second, cand, m)) {
        frozen = cand;
        frozen_m = m;
      }
    }
  }
  st.frozen = frozen;
  st.frozen_d = frozen_m;
  ctx.annotate("dual active dest=" + topo_.subnet_names[dest]);

  st.pending_replies.clear();
  for (const auto& [n, via] : topo_.neighbors(self_)) {
    (void)via;
    st.pending_replies.insert(n);
  }
  if (st.pending_replies.empty()) {
    transition_to_passive(dest, ctx);
    return;
  }
  DualQuery q{dest, advertised_vec(st)};
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (topo_.subnet_effectively_up(s)) ctx.broadcast(s, q);
  }
}

void EigrpBehavior::on_init(Context& ctx) {
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (!topo_.subnet_effectively_up(s)) continue;
    DestState& st = dests_[s];
    st.best = attached_vec(s);
    st.d = composite_metric(st.best, k_);
    st.fd = st.d;
    st.successor = kLocal;
    st.successor_rd = 0;
    st.fs_count = 1;
  }
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    advertise_full(s, ctx);
  }
}

void EigrpBehavior::on_message(const Message& msg, InterfaceIx, RouterIx from, Context& ctx) {
  if (const auto* up = std::get_if<DualUpdate>(&msg)) {
    DestState& st = dests_[up->dest];
    if (auto dit = doubt_.find(up->dest); dit != doubt_.end()) {
      dit->second.erase(from); // an update concludes the neighbor's diffusion
      if (dit->second.empty()) doubt_.erase(dit);
    }
    st.reported[from] = up->vec;
    if (!st.active) recompute_passive(up->dest, ctx);
    return;
  }
  if (const auto* q = std::get_if<DualQuery>(&msg)) {
    DestState& st = dests_[q->dest];
    doubt_[q->dest].insert(from);
    st.reported[from] = q->vec;
    if (st.active) {
      if (st.successor >= 0 && static_cast<RouterIx>(st.successor) == from)
        st.held_reply = static_cast<std::int32_t>(from); // answer at transition
      else
        reply_to(from, q->dest, ctx); // frozen distance
      return;
    }
    std::int32_t succ_before = st.successor;
    recompute_passive(q->dest, ctx);
    // recompute may have flipped us active (and already flooded queries).
    auto it = dests_.find(q->dest);
    if (it == dests_.end()) {
      DualVector u;
      u.unreachable = true;
      ctx.unicast_any(from, DualReply{q->dest, u});
      return;
    }
    if (it->second.active && succ_before >= 0 &&
        static_cast<RouterIx>(succ_before) == from)
      it->second.held_reply = static_cast<std::int32_t>(from);
    else
      reply_to(from, q->dest, ctx);
    return;
  }
  if (const auto* rep = std::get_if<DualReply>(&msg)) {
    auto it = dests_.find(rep->dest);
    if (it == dests_.end()) {
      // Answer to a computation we already abandoned; treat as plain news.
      DestState& st = dests_[rep->dest];
      st.reported[from] = rep->vec;
      recompute_passive(rep->dest, ctx);
      return;
    }
    DestState& st = it->second;
    st.reported[from] = rep->vec;
    if (st.active) {
      st.pending_replies.erase(from);
      if (st.pending_replies.empty()) transition_to_passive(rep->dest, ctx);
    } else {
      recompute_passive(rep->dest, ctx);
    }
    return;
  }
}

void EigrpBehavior::on_timer(const std::string&, std::int64_t, Context&) {}

void EigrpBehavior::on_adjacency(const AdjacencyEvent& ev, Context& ctx) {
  std::vector<SubnetIx> keys;
  for (const auto& [d, st] : dests_) {
    (void)st;
    keys.push_back(d);
  }
  for (RouterIx n : ev.lost_neighbors) {
    for (auto dit = doubt_.begin(); dit != doubt_.end();) {
      dit->second.erase(n);
      dit = dit->second.empty() ? doubt_.erase(dit) : std::next(dit);
    }
    for (SubnetIx d : keys) {
      auto it = dests_.find(d);
      if (it == dests_.end()) continue;
      DestState& st = it->second;
      bool had_report = st.reported.erase(n) != 0;
      bool was_pending = st.pending_replies.erase(n) != 0;
      if (st.held_reply == static_cast<std::int32_t>(n)) st.held_reply = kNoRouter;
      if (st.active && was_pending && st.pending_replies.empty()) {
        transition_to_passive(d, ctx);
      } else if (!st.active && had_report &&
                 st.successor == static_cast<std::int32_t>(n)) {
        recompute_passive(d, ctx);
      }
    }
  }
  if (ev.attached_to_me) {
    if (ev.up) {
      DestState& st = dests_[ev.subnet];
      if (!st.active) recompute_passive(ev.subnet, ctx);
    } else if (dests_.count(ev.subnet)) {
      DestState& st = dests_[ev.subnet];
      if (!st.active) recompute_passive(ev.subnet, ctx);
    }
  }
  if (ev.up && !ev.gained_neighbors.empty()) {
    advertise_full(ev.subnet, ctx);
    // A diffusion in progress extends to neighbors that joined after its
    // queries went out: they are polled directly and join the reply quorum,
    // so their answer is awaited like everyone else's.
    for (auto& [dest, st] : dests_) {
      if (!st.active) continue;
      for (RouterIx n : ev.gained_neighbors) st.pending_replies.insert(n);
      ctx.broadcast(ev.subnet, DualQuery{dest, advertised_vec(st)});
    }
  }
}

void EigrpBehavior::snapshot(std::vector<Row>& out) const {
  for (const auto& [dest, st] : dests_) {
    Row row;
    row.dest_kind = Row::DestKind::Subnet;
    row.dest = dest;
    std::uint64_t m = st.active ? st.frozen_d : st.d;
    row.metric = m == kCompositeInf ? kMetricInf : static_cast<std::int64_t>(m);
    row.next_hop = st.successor;
    row.valid = m != kCompositeInf;
    row.seq = static_cast<std::uint32_t>(st.fs_count);
    row.fd = st.fd == kCompositeInf ? kMetricInf : static_cast<std::int64_t>(st.fd);
    row.aux = st.successor_rd == kCompositeInf ? kMetricInf
                                               : static_cast<std::int64_t>(st.successor_rd);
    row.state = st.active ? 'A' : 'P';
    out.push_back(row);
  }
}

std::unique_ptr<ProtocolBehavior> make_eigrp(const Topology& topo, RouterIx self,
                                             const Params& p,
                                             std::vector<DualVector> subnet_cost) {
  return std::make_unique<EigrpBehavior>(topo, self, p, std::move(subnet_cost));
}

} // namespace dvsim
