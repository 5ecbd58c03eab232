#include "dvsim/proto/ripmti.hpp"

#include <algorithm>

namespace dvsim {
namespace {

Params with_mti_defaults(Params p) {
  if (!p.has("split_horizon")) p.set("split_horizon", "1");
  return p;
}

RipMtiBehavior::Mode parse_mode(const std::string& m) {
  if (m == "off") return RipMtiBehavior::Mode::Off;
  if (m == "normal") return RipMtiBehavior::Mode::Normal;
  if (m == "strict") return RipMtiBehavior::Mode::Strict;
  if (m == "careful") return RipMtiBehavior::Mode::Careful;
  throw std::invalid_argument("rip-mti mode must be off|normal|strict|careful");
}

} // namespace

RipMtiBehavior::RipMtiBehavior(const Topology& topo, RouterIx self, const Params& p)
    : RipBehavior(topo, self, with_mti_defaults(p)),
      mode_(parse_mode(p.get("mode", "normal"))) {}

std::optional<InterfaceIx> RipMtiBehavior::self_interface_on(SubnetIx s) const {
  for (InterfaceIx i : topo_.router_interfaces[self_])
    if (topo_.interface_subnet[i] == s) return i;
  return std::nullopt;
}

std::int64_t RipMtiBehavior::mrpm(InterfaceIx a) const {
  std::int64_t best = kMetricInf;
  for (const auto& [pair, m] : msilm_)
    if (pair.first == a) best = std::min(best, m);
  return best;
}

void RipMtiBehavior::learn(InterfaceIx a, InterfaceIx b, std::int64_t loop_metric,
                           Context& ctx) {
  auto key_ab = std::make_pair(a, b);
  auto key_ba = std::make_pair(b, a);
  auto it = msilm_.find(key_ab);
  if (it != msilm_.end() && it->second <= loop_metric) return;
  msilm_[key_ab] = loop_metric;
  msilm_[key_ba] = loop_metric; // the mirror loop exists with the same metric
  ctx.annotate("mti learn " + topo_.interface_names[a] + " " + topo_.interface_names[b] +
               " m=" + std::to_string(loop_metric));
}

void RipMtiBehavior::install(SubnetIx dest, std::int64_t metric, std::int32_t next_hop,
                             SubnetIx via_subnet) {
  RipBehavior::install(dest, metric, next_hop, via_subnet);
  if (metric < kRipInfinity) {
    if (auto i = self_interface_on(via_subnet)) last_valid_[dest] = {*i, metric};
  }
  if (pending_suspect_) {
    suspect_[dest] = true;
    pending_suspect_ = false;
  } else {
    suspect_.erase(dest); // a confidently accepted route supersedes the mark
  }
}

void RipMtiBehavior::invalidate(SubnetIx dest, bool local_trigger, Context& ctx) {
  auto it = routes_.find(dest);
  if (it != routes_.end() && it->second.metric < kRipInfinity) {
    if (auto i = self_interface_on(it->second.via_subnet))
      last_valid_[dest] = {*i, it->second.metric};
  }
  suspect_.erase(dest);
  RipBehavior::invalidate(dest, local_trigger, ctx);
}

void RipMtiBehavior::observe_update(SubnetIx dest, std::int64_t wire, InterfaceIx in_if,
                                    RouterIx from, Context& ctx) {
  if (mode_ == Mode::Off) return;
  auto it = routes_.find(dest);
  if (it == routes_.end() || it->second.metric >= kRipInfinity) return;
  const Route& r = it->second;

  // Careful mode: a suspect route whose own next hop reports a worse metric is
  // showing the loop symptom the uncertain test warned about — evict it.  The
  // eviction makes the offer re-run the alternative screen as a fresh one.
  if (mode_ == Mode::Careful && suspect_.count(dest) &&
      r.next_hop == static_cast<std::int32_t>(from) &&
      std::min<std::int64_t>(wire + 1, kRipInfinity) > r.metric) {
    ctx.annotate("mti evict dest=" + topo_.subnet_names[dest]);
    invalidate(dest, false, ctx);
    return;
  }

  if (wire >= kRipInfinity) return; // withdrawals describe no path
  auto b = self_interface_on(r.via_subnet);
  if (!b || *b == in_if) return; // need two distinct interfaces for a loop

  std::int64_t m_a = wire + 2;       // my would-be path metric via the offer
  std::int64_t m_b = r.metric + 1;   // my current path metric
  std::int64_t loop = m_a + m_b - 1; // terminal hops onto dest merge into one

  std::int64_t rp_a = mrpm(in_if);
  std::int64_t rp_b = mrpm(*b);
  bool no_x = rp_a == kMetricInf || rp_b == kMetricInf || loop < rp_a + rp_b;
  bool no_y = rp_a == kMetricInf || m_a < rp_a + m_b;
  if (no_x && no_y) learn(in_if, *b, loop, ctx);
}

bool RipMtiBehavior::allow_switch(SubnetIx dest, std::int64_t wire, InterfaceIx in_if,
                                  RouterIx from, Context& ctx) {
  (void)from;
  if (mode_ == Mode::Off) return true;
  auto it = routes_.find(dest);
  bool have_valid = it != routes_.end() && it->second.metric < kRipInfinity;
  if (have_valid) return true; // strictly better offer over a live route: plain RIP

  auto last = last_valid_.find(dest);
  if (last == last_valid_.end()) return true; // never learned: bootstrap installs
  auto [b_if, b_metric] = last->second;
  if (b_if == in_if) return true; // same-direction re-offer: no pair to screen

  auto ms = msilm_.find(std::make_pair(in_if, b_if));
  if (ms == msilm_.end()) {
    ctx.annotate("mti reject dest=" + topo_.subnet_names[dest] + " rule=no-simple-path");
    return false;
  }
  std::int64_t m_a = wire + 2;
  std::int64_t m_b = b_metric + 1;
  if (m_a + m_b - 1 < ms->second) {
    ctx.annotate("mti reject dest=" + topo_.subnet_names[dest] + " rule=below-msilm");
    return false;
  }
  if (m_a >= mrpm(in_if) + m_b - 1) {
    switch (mode_) {
      case Mode::Normal:
        ctx.annotate("mti uncertain dest=" + topo_.subnet_names[dest] + " accept");
        return true;
      case Mode::Strict:
        ctx.annotate("mti uncertain dest=" + topo_.subnet_names[dest] + " reject");
        return false;
      case Mode::Careful:
        ctx.annotate("mti uncertain dest=" + topo_.subnet_names[dest] + " suspect");
        pending_suspect_ = true; // consumed by the install this acceptance triggers
        return true;
      default:
        return true;
    }
  }
  return true;
}

char RipMtiBehavior::row_state(SubnetIx dest, const Route& r) const {
  if (suspect_.count(dest) && r.metric < kRipInfinity) return 'S';
  return RipBehavior::row_state(dest, r);
}

std::unique_ptr<ProtocolBehavior> make_ripmti(const Topology& topo, RouterIx self,
                                              const Params& p) {
  return std::make_unique<RipMtiBehavior>(topo, self, p);
}

} // namespace dvsim
