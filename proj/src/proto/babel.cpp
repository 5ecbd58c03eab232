#include "dvsim/proto/babel.hpp"

#include <algorithm>

namespace dvsim {

namespace {
constexpr std::uint32_t kSeqMask = 0xFFFF;

// Lexicographic order on sequenced distances: newer seqno ranks smaller.
bool sd_less(std::uint32_t s1, std::int64_t m1, std::uint32_t s2, std::int64_t m2) {
  if (s1 != s2)
    return seq16_gt(static_cast<std::uint16_t>(s1), static_cast<std::uint16_t>(s2));
  return m1 < m2;
}
} // namespace

BabelBehavior::BabelBehavior(const Topology& topo, RouterIx self, const Params& p,
                             std::vector<std::int64_t> link_cost, std::uint64_t seed)
    : topo_(topo), self_(self), interval_(p.get_int("babel_interval", 20)),
      retry_spacing_(p.get_int("request_retry_spacing", 4)),
      max_attempts_(static_cast<int>(p.get_int("request_attempts", 4))),
      request_hops_(p.get_int("request_hops", 16)),
      retention_(p.get_int("request_retention", 16)),
      request_loss_(p.get_double("request_loss", 0.0)),
      own_seqno_(static_cast<std::uint32_t>(p.get_int("initial_seqno", 1)) & kSeqMask),
      cost_(std::move(link_cost)),
      rng_(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(self) + 1))) {
  if (cost_.size() != topo_.num_subnets())
    throw std::invalid_argument("babel: one link cost per subnet required");
  if (interval_ < 1 || retry_spacing_ < 1 || max_attempts_ < 1 || request_hops_ < 1)
    throw std::invalid_argument("babel: intervals and attempt counts must be positive");
  if (request_loss_ < 0.0 || request_loss_ > 1.0)
    throw std::invalid_argument("request_loss must be within [0,1]");
}

bool BabelBehavior::roll_request_loss() {
  if (request_loss_ <= 0.0) return false;
  double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return u < request_loss_;
}

bool BabelBehavior::feasible(RouterIx source, const NeighborAdv& e) const {
  if (e.metric == kMetricInf) return false;
  auto it = fd_.find(source);
  if (it == fd_.end()) return true; // never advertised: anything goes
  return sd_less(e.seqno, e.metric, it->second.seqno, it->second.metric);
}

std::pair<std::uint32_t, std::int64_t> BabelBehavior::advertised_pair(RouterIx source) const {
  if (source == self_) return {own_seqno_, 0};
  auto it = selected_.find(source);
  if (it != selected_.end()) return {it->second.seqno, it->second.total};
  auto f = fd_.find(source);
  return {f == fd_.end() ? 0 : f->second.seqno, kMetricInf}; // retraction
}

void BabelBehavior::advertise_one(RouterIx source, Context& ctx) {
  auto [seqno, metric] = advertised_pair(source);
  BabelUpdate up{source, seqno, metric};
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (topo_.subnet_effectively_up(s)) ctx.broadcast(s, up);
  }
  if (metric == kMetricInf) return; // retractions never improve the FD
  auto it = fd_.find(source);
  if (it == fd_.end() || sd_less(seqno, metric, it->second.seqno, it->second.metric))
    fd_[source] = {seqno, metric};
}

void BabelBehavior::advertise_all(Context& ctx) {
  advertise_one(self_, ctx);
  for (const auto& [source, entries] : adv_) {
    (void)entries;
    if (source != self_) advertise_one(source, ctx);
  }
}

void BabelBehavior::reselect(RouterIx source, Context& ctx) {
  auto old_it = selected_.find(source);
  bool had = old_it != selected_.end();
  Selected old = had ? old_it->second : Selected{};

  const auto& entries = adv_[source];
  bool found = false;
  Selected best;
  for (const auto& [n, e] : entries) {
    if (!feasible(source, e)) continue;
    if (!found || e.total < best.total) {
      best = Selected{n, e.seqno, e.total};
      found = true;
    }
  }

  if (found) {
    selected_[source] = best;
    pending_.erase(source);
    if (!had || old.neighbor != best.neighbor || old.seqno != best.seqno ||
        old.total != best.total)
      advertise_one(source, ctx);
    return;
  }

  if (had) {
    selected_.erase(source);
    advertise_one(source, ctx); // retraction
  }
  bool starving = false;
  for (const auto& [n, e] : entries) {
    (void)n;
    if (e.metric != kMetricInf) {
      starving = true;
      break;
    }
  }
  if (starving && !pending_.count(source)) {
    auto f = fd_.find(source);
    if (f != fd_.end()) {
      Pending pend;
      pend.seqno = (f->second.seqno + 1) & kSeqMask;
      pend.attempts = 0;
      pend.next_at = now_;
      ctx.annotate("babel starvation source=" + topo_.router_names[source]);
      send_request(source, pend, ctx);
      if (pend.attempts < max_attempts_) pending_[source] = pend;
    }
  }
}

void BabelBehavior::send_request(RouterIx source, Pending& pend, Context& ctx) {
  // Next hop toward the originator: the best remaining entry, feasible or not.
  RouterIx nh = 0;
  bool found = false;
  std::int64_t best_total = kMetricInf;
  for (const auto& [n, e] : adv_[source]) {
    if (e.metric == kMetricInf) continue;
    if (!found || e.total < best_total) {
      nh = n;
      best_total = e.total;
      found = true;
    }
  }
  ++pend.attempts;
  pend.next_at = now_ + retry_spacing_;
  if (!found) {
    pend.attempts = max_attempts_; // nothing left to ask through
    return;
  }
  if (roll_request_loss()) {
    ctx.annotate("babel request dropped source=" + topo_.router_names[source] +
                 " attempt=" + std::to_string(pend.attempts));
    return;
  }
  ctx.unicast_any(nh, BabelSeqnoRequest{source, pend.seqno, request_hops_, self_,
                                        static_cast<std::uint32_t>(pend.attempts)});
}

void BabelBehavior::on_init(Context& ctx) {
  ctx.arm_timer(1, "tick");
}

void BabelBehavior::on_timer(const std::string& tag, std::int64_t, Context& ctx) {
  if (tag != "tick") return;
  ++now_;
  ctx.arm_timer(1, "tick");

  for (auto it = seen_req_.begin(); it != seen_req_.end();) {
    if (it->second <= now_)
      it = seen_req_.erase(it);
    else
      ++it;
  }

  std::vector<RouterIx> due;
  for (const auto& [source, pend] : pending_)
    if (pend.next_at <= now_) due.push_back(source);
  for (RouterIx source : due) {
    auto it = pending_.find(source);
    if (it == pending_.end()) continue;
    if (selected_.count(source) || it->second.attempts >= max_attempts_) {
      pending_.erase(it);
      continue;
    }
    send_request(source, it->second, ctx);
  }

  if (now_ >= static_cast<Tick>(self_) + 1 &&
      (now_ - (static_cast<Tick>(self_) + 1)) % interval_ == 0)
    advertise_all(ctx);
}

void BabelBehavior::on_message(const Message& msg, InterfaceIx in_interface, RouterIx from,
                               Context& ctx) {
  if (const auto* up = std::get_if<BabelUpdate>(&msg)) {
    if (up->source == self_) return; // nobody outranks the originator
    SubnetIx s = topo_.interface_subnet[in_interface];
    std::int64_t cost = cost_[s];
    NeighborAdv e;
    e.seqno = up->seqno & kSeqMask;
    e.metric = up->metric;
    e.total = up->metric == kMetricInf ? kMetricInf : up->metric + cost;
    adv_[up->source][from] = e;
    reselect(up->source, ctx);
    return;
  }
  if (const auto* rq = std::get_if<BabelSeqnoRequest>(&msg)) {
    auto key = std::make_tuple(rq->requester, rq->source, rq->seqno & kSeqMask, rq->attempt);
    if (seen_req_.count(key)) return;
    seen_req_[key] = now_ + retention_;

    if (rq->source == self_) {
      if (seq16_gt(static_cast<std::uint16_t>(rq->seqno),
                   static_cast<std::uint16_t>(own_seqno_)))
        own_seqno_ = rq->seqno & kSeqMask;
      ctx.annotate("babel seqno answer seq=" + std::to_string(own_seqno_));
      advertise_one(self_, ctx);
      return;
    }
    if (rq->hop_limit <= 1) return;
    // Forward toward the originator, preferring the installed route but
    // falling back to any live claim.
    RouterIx nh = static_cast<RouterIx>(-1);
    bool found = false;
    auto sel = selected_.find(rq->source);
    if (sel != selected_.end()) {
      nh = sel->second.neighbor;
      found = true;
    } else {
      std::int64_t best_total = kMetricInf;
      for (const auto& [n, e] : adv_[rq->source]) {
        if (e.metric == kMetricInf) continue;
        if (!found || e.total < best_total) {
          nh = n;
          best_total = e.total;
          found = true;
        }
      }
    }
    if (!found || nh == from || nh == rq->requester) return;
    if (roll_request_loss()) {
      ctx.annotate("babel request dropped source=" + topo_.router_names[rq->source] +
                   " attempt=" + std::to_string(rq->attempt));
      return;
    }
    BabelSeqnoRequest fwd = *rq;
    fwd.hop_limit = rq->hop_limit - 1;
    ctx.unicast_any(nh, fwd);
    return;
  }
}

void BabelBehavior::on_adjacency(const AdjacencyEvent& ev, Context& ctx) {
  if (!ev.lost_neighbors.empty()) {
    std::vector<RouterIx> sources;
    for (const auto& [source, entries] : adv_) {
      (void)entries;
      sources.push_back(source);
    }
    for (RouterIx source : sources) {
      bool touched = false;
      for (RouterIx n : ev.lost_neighbors) touched |= adv_[source].erase(n) != 0;
      if (!touched) continue;
      auto sel = selected_.find(source);
      bool selected_via_lost =
          sel != selected_.end() &&
          std::find(ev.lost_neighbors.begin(), ev.lost_neighbors.end(),
                    sel->second.neighbor) != ev.lost_neighbors.end();
      if (selected_via_lost) reselect(source, ctx);
    }
  }
  if (ev.up && !ev.gained_neighbors.empty()) advertise_all(ctx);
}

void BabelBehavior::snapshot(std::vector<Row>& out) const {
  auto fd_fields = [&](RouterIx source, Row& row) {
    auto f = fd_.find(source);
    if (f != fd_.end()) {
      row.aux = static_cast<std::int64_t>(f->second.seqno);
      row.fd = f->second.metric;
    }
  };
  {
    Row row;
    row.dest_kind = Row::DestKind::Router;
    row.dest = self_;
    row.metric = 0;
    row.next_hop = kLocal;
    row.valid = true;
    row.seq = own_seqno_;
    row.aux = 0;
    row.fd = 0;
    fd_fields(self_, row);
    row.state = '-';
    out.push_back(row);
  }
  for (const auto& [source, entries] : adv_) {
    (void)entries;
    if (source == self_) continue;
    Row row;
    row.dest_kind = Row::DestKind::Router;
    row.dest = source;
    auto sel = selected_.find(source);
    if (sel != selected_.end()) {
      row.metric = sel->second.total;
      row.next_hop = static_cast<std::int32_t>(sel->second.neighbor);
      row.valid = true;
      row.seq = sel->second.seqno;
    } else {
      row.metric = kMetricInf;
      row.next_hop = kNoRouter;
      row.valid = false;
      row.seq = 0;
    }
    row.aux = 0;
    row.fd = 0;
    fd_fields(source, row);
    row.state = '-';
    out.push_back(row);
  }
}

std::unique_ptr<ProtocolBehavior> make_babel(const Topology& topo, RouterIx self,
                                             const Params& p,
                                             std::vector<std::int64_t> link_cost,
                                             std::uint64_t seed) {
  return std::make_unique<BabelBehavior>(topo, self, p, std::move(link_cost), seed);
}

} // namespace dvsim
