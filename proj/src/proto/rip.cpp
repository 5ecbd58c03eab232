#include "dvsim/proto/rip.hpp"

#include <algorithm>

namespace dvsim {

RipBehavior::RipBehavior(const Topology& topo, RouterIx self, const Params& p)
    : topo_(topo),
      self_(self),
      update_interval_(p.get_int("update_interval", 30)),
      split_horizon_(p.get_bool("split_horizon", false)),
      poisoned_reverse_(p.get_bool("poisoned_reverse", false)),
      triggered_updates_(p.get_bool("triggered_updates", true)),
      hold_down_(p.get_int("hold_down", 0)),
      hold_on_local_(p.get_bool("hold_on_local", true)),
      hold_on_receive_(p.get_bool("hold_on_receive", true)),
      sync_(p.get_bool("sync", false)) {
  if (update_interval_ < 1) throw std::invalid_argument("update_interval must be >= 1");
  if (hold_down_ < 0) throw std::invalid_argument("hold_down must be >= 0");
}

void RipBehavior::on_init(Context& ctx) {
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (topo_.subnet_effectively_up(s)) {
      install(s, 0, kLocal, s);
      changed_.insert(s);
    }
  }
  if (sync_) {
    changed_.clear();
    return;
  }
  // Stagger periodics by router index so same-tick behavior never depends on
  // incidental tie-breaking.
  ctx.arm_timer(static_cast<Tick>(self_) + 1, "periodic");
  flush_changes(ctx);
}

void RipBehavior::install(SubnetIx dest, std::int64_t metric, std::int32_t next_hop,
                          SubnetIx via_subnet) {
  Route& r = routes_[dest];
  r.metric = metric;
  r.next_hop = next_hop;
  r.via_subnet = via_subnet;
}

void RipBehavior::invalidate(SubnetIx dest, bool local_trigger, Context& ctx) {
  Route& r = routes_[dest];
  if (r.metric == kRipInfinity && r.next_hop == kNoRouter) return;
  r.metric = kRipInfinity;
  r.next_hop = kNoRouter;
  changed_.insert(dest);
  bool want_hold = hold_down_ > 0 &&
                   (local_trigger ? hold_on_local_ : hold_on_receive_);
  if (want_hold && r.hold_until < 0) {
    r.hold_until = ctx.now() + hold_down_;
    ctx.arm_timer(hold_down_, "holddown", static_cast<std::int64_t>(dest));
  }
}

void RipBehavior::observe_update(SubnetIx, std::int64_t, InterfaceIx, RouterIx, Context&) {}

bool RipBehavior::allow_switch(SubnetIx, std::int64_t, InterfaceIx, RouterIx, Context&) {
  return true;
}

char RipBehavior::row_state(SubnetIx, const Route& r) const {
  return r.hold_until >= 0 ? 'H' : '-';
}

bool RipBehavior::advertise_dest(SubnetIx) const { return true; }

void RipBehavior::process_entry(SubnetIx dest, std::int64_t wire, InterfaceIx in_if,
                                RouterIx from, Context& ctx) {
  if (wire < 0 || wire > kRipInfinity) return; // malformed entry
  observe_update(dest, wire, in_if, from, ctx);
  std::int64_t cand = std::min<std::int64_t>(wire + 1, kRipInfinity);
  SubnetIx s = topo_.interface_subnet[in_if];

  auto it = routes_.find(dest);
  if (it != routes_.end() && it->second.hold_until >= 0) {
    // Frozen: the hold-down timer clears this flag at expiry; until then no
    // neighbor may resurrect the destination.
    if (ctx.now() < it->second.hold_until) return;
    it->second.hold_until = -1;
  }

  if (it == routes_.end() || it->second.metric == kRipInfinity) {
    if (cand < kRipInfinity && allow_switch(dest, wire, in_if, from, ctx)) {
      install(dest, cand, static_cast<std::int32_t>(from), s);
      changed_.insert(dest);
    }
    return;
  }

  Route& r = it->second;
  if (r.next_hop == kLocal) return; // attached routes are unbeatable
  if (r.next_hop == static_cast<std::int32_t>(from)) {
    // News from the current next hop is always applied, better or worse.
    if (cand == r.metric) {
      r.via_subnet = s;
      return;
    }
    if (cand == kRipInfinity) {
      invalidate(dest, false, ctx);
    } else {
      r.metric = cand;
      r.via_subnet = s;
      changed_.insert(dest);
    }
    return;
  }
  if (cand < r.metric && allow_switch(dest, wire, in_if, from, ctx)) {
    install(dest, cand, static_cast<std::int32_t>(from), s);
    changed_.insert(dest);
  }
}

void RipBehavior::on_message(const Message& msg, InterfaceIx in_interface,
                             RouterIx from_router, Context& ctx) {
  const RipUpdate* up = std::get_if<RipUpdate>(&msg);
  if (!up) return; // other traffic on the wire is not ours
  for (const RipEntry& e : up->entries)
    process_entry(e.dest, e.metric, in_interface, from_router, ctx);
  flush_changes(ctx);
}

void RipBehavior::on_timer(const std::string& tag, std::int64_t payload, Context& ctx) {
  if (tag == "periodic") {
    advertise(ctx, false, nullptr);
    ctx.arm_timer(update_interval_, "periodic");
    changed_.clear(); // the full broadcast covers anything pending
    return;
  }
  if (tag == "holddown") {
    auto it = routes_.find(static_cast<SubnetIx>(payload));
    if (it == routes_.end()) return;
    Route& r = it->second;
    if (r.hold_until != ctx.now()) return; // superseded by a later freeze
    r.hold_until = -1;
    SubnetIx dest = it->first;
    if (topo_.attached(self_, dest) && topo_.subnet_effectively_up(dest)) {
      install(dest, 0, kLocal, dest);
      changed_.insert(dest);
    }
    flush_changes(ctx);
  }
}

void RipBehavior::on_adjacency(const AdjacencyEvent& ev, Context& ctx) {
  if (!ev.up) {
    for (auto& [dest, r] : routes_) {
      bool lost_attached = dest == ev.subnet && r.next_hop == kLocal;
      bool lost_learned = r.next_hop >= 0 && r.via_subnet == ev.subnet &&
                          r.metric < kRipInfinity;
      if (lost_attached || lost_learned) invalidate(dest, true, ctx);
    }
  } else {
    if (ev.attached_to_me && topo_.subnet_effectively_up(ev.subnet)) {
      auto it = routes_.find(ev.subnet);
      bool frozen = it != routes_.end() && it->second.hold_until >= 0;
      if (!frozen && (it == routes_.end() || it->second.next_hop != kLocal)) {
        install(ev.subnet, 0, kLocal, ev.subnet);
        changed_.insert(ev.subnet);
      }
    }
  }
  flush_changes(ctx);
}

void RipBehavior::on_round(Context& ctx) {
  if (!sync_) return;
  advertise(ctx, false, nullptr);
  changed_.clear();
}

void RipBehavior::advertise(Context& ctx, bool triggered, const std::set<SubnetIx>* only) {
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (!topo_.subnet_effectively_up(s)) continue;
    RipUpdate up;
    up.triggered = triggered;
    for (const auto& [dest, r] : routes_) {
      if (only && !only->count(dest)) continue;
      if (!advertise_dest(dest)) continue;
      std::int64_t wire = r.metric;
      if ((split_horizon_ || poisoned_reverse_) && r.via_subnet == s &&
          r.next_hop != kNoRouter && r.metric < kRipInfinity) {
        if (!poisoned_reverse_) continue;
        wire = kRipInfinity;
      }
      up.entries.push_back({dest, wire});
    }
    if (!up.entries.empty()) ctx.broadcast(s, std::move(up));
  }
}

void RipBehavior::flush_changes(Context& ctx) {
  if (changed_.empty()) return;
  if (!triggered_updates_ || sync_) {
    changed_.clear();
    return;
  }
  advertise(ctx, true, &changed_);
  changed_.clear();
}

void RipBehavior::snapshot(std::vector<Row>& out) const {
  for (const auto& [dest, r] : routes_) {
    Row row;
    row.dest_kind = Row::DestKind::Subnet;
    row.dest = dest;
    row.metric = r.metric;
    row.next_hop = r.next_hop;
    row.valid = r.metric < kRipInfinity;
    row.aux = r.hold_until >= 0 ? r.hold_until : 0;
    row.state = row_state(dest, r);
    out.push_back(row);
  }
}

std::unique_ptr<ProtocolBehavior> make_rip(const Topology& topo, RouterIx self,
                                           const Params& p) {
  return std::make_unique<RipBehavior>(topo, self, p);
}

} // namespace dvsim
