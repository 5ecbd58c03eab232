#include "dvsim/proto/riptree.hpp"

#include <algorithm>

namespace dvsim {

namespace {
std::set<RouterIx> live_neighbors(const Topology& topo, RouterIx self) {
  std::set<RouterIx> out;
  for (const auto& [n, via] : topo.neighbors(self)) {
    (void)via;
    out.insert(n);
  }
  return out;
}
} // namespace

RipTreeBehavior::RipTreeBehavior(const Topology& topo, RouterIx self, const Params& p)
    : RipBehavior(topo, self, p), safety_(p.get_int("tree_safety", 60)) {
  if (safety_ < 1) throw std::invalid_argument("tree_safety must be >= 1");
}

char RipTreeBehavior::row_state(SubnetIx dest, const Route& r) const {
  auto it = tree_.find(dest);
  if (it != tree_.end() && it->second.quiesced) return 'Q';
  return RipBehavior::row_state(dest, r);
}

bool RipTreeBehavior::advertise_dest(SubnetIx dest) const {
  auto it = tree_.find(dest);
  return it == tree_.end() || !it->second.quiesced;
}

void RipTreeBehavior::begin_invalidation(SubnetIx dest, Context& ctx) {
  TreeState& st = tree_[dest];
  if (st.quiesced) return; // an earlier wave already owns this destination
  RipBehavior::invalidate(dest, true, ctx);
  ++wave_seq_;
  st.quiesced = true;
  st.origin = self_;
  st.seq = wave_seq_;
  st.parent = kLocal;
  st.awaiting = live_neighbors(topo_, self_);
  st.children.clear();
  st.child_links.clear();
  st.resume_at = ctx.now() + safety_;
  joined_[dest].insert({self_, wave_seq_});
  ctx.annotate("tree begin dest=" + topo_.subnet_names[dest] + " seq=" +
               std::to_string(wave_seq_));
  for (RouterIx n : st.awaiting)
    ctx.unicast_any(n, TreeInvalidRoute{dest, st.seq, self_});
  ctx.arm_timer(safety_, "tree-safety", static_cast<std::int64_t>(dest));
  check_completion(dest, ctx);
}

void RipTreeBehavior::join_wave(SubnetIx dest, std::uint32_t seq, RouterIx origin,
                                RouterIx parent, Context& ctx) {
  RipBehavior::invalidate(dest, false, ctx);
  TreeState& st = tree_[dest];
  st.quiesced = true;
  st.origin = origin;
  st.seq = seq;
  st.parent = static_cast<std::int32_t>(parent);
  st.awaiting = live_neighbors(topo_, self_);
  st.awaiting.erase(parent);
  st.children.clear();
  st.child_links.clear();
  st.resume_at = ctx.now() + safety_;
  joined_[dest].insert({origin, seq});
  ctx.annotate("tree join dest=" + topo_.subnet_names[dest] + " parent=" +
               topo_.router_names[parent]);
  ctx.unicast_any(parent, TreeInvalidRelay{dest, seq, origin});
  for (RouterIx n : st.awaiting)
    ctx.unicast_any(n, TreeInvalidRoute{dest, seq, origin});
  ctx.arm_timer(safety_, "tree-safety", static_cast<std::int64_t>(dest));
  check_completion(dest, ctx);
}

void RipTreeBehavior::check_completion(SubnetIx dest, Context& ctx) {
  auto it = tree_.find(dest);
  if (it == tree_.end()) return;
  TreeState& st = it->second;
  if (!st.quiesced || !st.awaiting.empty() || !st.children.empty()) return;
  if (st.parent == kLocal) {
    ctx.annotate("tree complete dest=" + topo_.subnet_names[dest] + " seq=" +
                 std::to_string(st.seq));
    resume(dest, true, ctx);
  } else {
    ctx.annotate("tree relay done dest=" + topo_.subnet_names[dest]);
    ctx.unicast_any(static_cast<RouterIx>(st.parent),
                    TreeInvalidComplete{dest, st.seq, st.origin});
    // Still quiesced: routing resumes only when the root releases the tree.
  }
}

void RipTreeBehavior::resume(SubnetIx dest, bool release_children, Context& ctx) {
  TreeState& st = tree_[dest];
  if (release_children)
    for (RouterIx c : st.child_links)
      ctx.unicast_any(c, TreeStartRouting{dest, st.seq, st.origin});
  st.quiesced = false;
  st.resume_at = -1;
  ctx.annotate("tree resume dest=" + topo_.subnet_names[dest]);
  changed_.insert(dest); // the invalid route goes out at 16: poison for strays
}

void RipTreeBehavior::on_message(const Message& msg, InterfaceIx in_interface,
                                 RouterIx from, Context& ctx) {
  if (const auto* up = std::get_if<RipUpdate>(&msg)) {
    for (const RipEntry& e : up->entries) {
      auto ti = tree_.find(e.dest);
      if (ti != tree_.end() && ti->second.quiesced) continue; // wave owns it
      process_entry(e.dest, e.metric, in_interface, from, ctx);
    }
    flush_changes(ctx);
    return;
  }
  if (const auto* iv = std::get_if<TreeInvalidRoute>(&msg)) {
    if (joined_[iv->dest].count({iv->origin, iv->seq})) {
      ctx.unicast_any(from, TreeNotChild{iv->dest, iv->seq, iv->origin});
    } else {
      auto rt = routes_.find(iv->dest);
      bool child = rt != routes_.end() && rt->second.metric < kRipInfinity &&
                   rt->second.next_hop == static_cast<std::int32_t>(from);
      if (child)
        join_wave(iv->dest, iv->seq, iv->origin, from, ctx);
      else
        ctx.unicast_any(from, TreeNotChild{iv->dest, iv->seq, iv->origin});
    }
    flush_changes(ctx);
    return;
  }
  if (const auto* rl = std::get_if<TreeInvalidRelay>(&msg)) {
    auto it = tree_.find(rl->dest);
    if (it != tree_.end() && same_wave(it->second, rl->seq, rl->origin)) {
      it->second.awaiting.erase(from);
      it->second.children.insert(from);
      it->second.child_links.insert(from);
      check_completion(rl->dest, ctx);
    }
    flush_changes(ctx);
    return;
  }
  if (const auto* nc = std::get_if<TreeNotChild>(&msg)) {
    auto it = tree_.find(nc->dest);
    if (it != tree_.end() && same_wave(it->second, nc->seq, nc->origin)) {
      it->second.awaiting.erase(from);
      check_completion(nc->dest, ctx);
    }
    flush_changes(ctx);
    return;
  }
  if (const auto* cp = std::get_if<TreeInvalidComplete>(&msg)) {
    auto it = tree_.find(cp->dest);
    if (it != tree_.end() && same_wave(it->second, cp->seq, cp->origin)) {
      it->second.children.erase(from);
      check_completion(cp->dest, ctx);
    }
    flush_changes(ctx);
    return;
  }
  if (const auto* sr = std::get_if<TreeStartRouting>(&msg)) {
    auto it = tree_.find(sr->dest);
    if (it != tree_.end() && same_wave(it->second, sr->seq, sr->origin))
      resume(sr->dest, true, ctx);
    flush_changes(ctx);
    return;
  }
}

void RipTreeBehavior::on_timer(const std::string& tag, std::int64_t payload, Context& ctx) {
  if (tag == "tree-safety") {
    auto it = tree_.find(static_cast<SubnetIx>(payload));
    if (it != tree_.end() && it->second.quiesced && it->second.resume_at == ctx.now()) {
      ctx.annotate("tree safety resume dest=" +
                   topo_.subnet_names[static_cast<SubnetIx>(payload)]);
      resume(static_cast<SubnetIx>(payload), false, ctx);
      flush_changes(ctx);
    }
    return;
  }
  RipBehavior::on_timer(tag, payload, ctx);
}

void RipTreeBehavior::on_adjacency(const AdjacencyEvent& ev, Context& ctx) {
  if (!ev.up) {
    // A vanished neighbor can no longer answer or complete: treat silence as
    // the answer so waves don't stall until the safety deadline.
    if (!ev.lost_neighbors.empty()) {
      std::vector<SubnetIx> dests;
      for (const auto& [d, st] : tree_) {
        (void)st;
        dests.push_back(d);
      }
      for (SubnetIx d : dests) {
        TreeState& st = tree_[d];
        if (!st.quiesced) continue;
        bool touched = false;
        for (RouterIx n : ev.lost_neighbors) {
          touched |= st.awaiting.erase(n) != 0;
          touched |= st.children.erase(n) != 0;
          st.child_links.erase(n);
        }
        if (touched) check_completion(d, ctx);
      }
    }
    std::vector<SubnetIx> lost;
    for (const auto& [dest, r] : routes_) {
      bool lost_attached = dest == ev.subnet && r.next_hop == kLocal;
      bool lost_learned = r.next_hop >= 0 && r.via_subnet == ev.subnet &&
                          r.metric < kRipInfinity;
      if (lost_attached || lost_learned) lost.push_back(dest);
    }
    for (SubnetIx dest : lost) begin_invalidation(dest, ctx);
    flush_changes(ctx);
    return;
  }
  RipBehavior::on_adjacency(ev, ctx);
}

std::unique_ptr<ProtocolBehavior> make_riptree(const Topology& topo, RouterIx self,
                                               const Params& p) {
  return std::make_unique<RipTreeBehavior>(topo, self, p);
}

} // namespace dvsim
