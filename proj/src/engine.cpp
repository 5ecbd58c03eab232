#include "dvsim/engine.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dvsim {

const char* kind_name(const Message& m) {
  struct V {
    const char* operator()(const RipUpdate& u) const { return u.triggered ? "rip_triggered" : "rip_periodic"; }
    const char* operator()(const AodvRreq&) const { return "aodv_rreq"; }
    const char* operator()(const AodvRrep&) const { return "aodv_rrep"; }
    const char* operator()(const AodvRerr&) const { return "aodv_rerr"; }
    const char* operator()(const AodvHello&) const { return "aodv_hello"; }
    const char* operator()(const DualUpdate&) const { return "dual_update"; }
    const char* operator()(const DualQuery&) const { return "dual_query"; }
    const char* operator()(const DualReply&) const { return "dual_reply"; }
    const char* operator()(const BabelUpdate&) const { return "babel_update"; }
    const char* operator()(const BabelSeqnoRequest&) const { return "babel_seqno_request"; }
    const char* operator()(const TreeInvalidRoute&) const { return "tree_invalid_route"; }
    const char* operator()(const TreeInvalidRelay&) const { return "tree_invalid_relay"; }
    const char* operator()(const TreeNotChild&) const { return "tree_not_child"; }
    const char* operator()(const TreeInvalidComplete&) const { return "tree_invalid_complete"; }
    const char* operator()(const TreeStartRouting&) const { return "tree_start_routing"; }
    const char* operator()(const DataPacket&) const { return "data"; }
  };
  return std::visit(V{}, m);
}

void Context::unicast_any(RouterIx to, Message msg) {
  for (InterfaceIx i : topo_.router_interfaces[self_]) {
    SubnetIx s = topo_.interface_subnet[i];
    if (!topo_.subnet_effectively_up(s)) continue;
    for (InterfaceIx j : topo_.subnet_interfaces[s])
      if (topo_.interface_owner[j] == to) {
        unicast(s, to, std::move(msg));
        return;
      }
  }
  // No shared live subnet: the frame has nowhere to go.
}

void Engine::set_subnet_latency(SubnetIx s, Tick latency) {
  if (latency < 1) throw std::invalid_argument("subnet latency must be >= 1 tick");
  if (latency_.size() < topo_.num_subnets()) latency_.resize(topo_.num_subnets(), 1);
  latency_.at(s) = latency;
}

void Engine::set_subnet_loss(SubnetIx s, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("loss probability out of [0,1]");
  if (loss_.size() < topo_.num_subnets()) loss_.resize(topo_.num_subnets(), 0.0);
  loss_.at(s) = p;
}

namespace {

struct QItem {
  Tick at = 0;
  std::uint64_t seq = 0;
  enum class Kind { Script, Deliver, Timer } kind = Kind::Script;
  // Script
  ScriptEvent ev{};
  // Deliver
  RouterIx to = 0;
  RouterIx from = 0;
  SubnetIx subnet = 0;
  Message msg{};
  // Timer
  RouterIx router = 0;
  std::uint32_t incarnation = 0;
  std::string tag;
  std::int64_t payload = 0;
};

struct QLater {
  bool operator()(const QItem& a, const QItem& b) const {
    if (a.at != b.at) return a.at > b.at;
    return a.seq > b.seq;
  }
};

std::string fmt_metric(std::int64_t m) {
  return m == kMetricInf ? std::string("inf") : std::to_string(m);
}

} // namespace

Trace Engine::run(const BehaviorFactory& make, const std::vector<ScriptEvent>& script,
                  Mode mode, Tick horizon, std::uint64_t seed) {
  Topology topo = topo_; // run-local mutable copy
  std::vector<Tick> latency = latency_;
  std::vector<double> loss = loss_;
  latency.resize(topo.num_subnets(), 1);
  loss.resize(topo.num_subnets(), 0.0);

  const std::size_t R = topo.num_routers();
  std::vector<std::unique_ptr<ProtocolBehavior>> behavior(R);
  std::vector<std::uint32_t> incarnation(R, 0);

  std::priority_queue<QItem, std::vector<QItem>, QLater> queue;
  std::uint64_t next_seq = 0;
  std::mt19937_64 rng(seed);

  Trace trace;
  trace.snapshots.assign(static_cast<std::size_t>(horizon) + 1, {});

  auto log = [&](Tick t, const std::string& who, const std::string& what) {
    trace.event_log.push_back(std::to_string(t) + "|" + who + "|" + what);
  };

  // Expands one SendOp into per-receiver copies and enqueues them.  Loss and
  // the receiver set are decided at send time; receiver liveness and link
  // state are re-checked at delivery.
  auto do_send = [&](Tick now, RouterIx sender, const SendOp& op) {
    if (op.subnet >= topo.num_subnets()) throw std::logic_error("send on unknown subnet");
    ++trace.sent_by_kind[kind_name(op.msg)];
    ++trace.messages_sent;
    if (!topo.subnet_effectively_up(op.subnet)) {
      ++trace.dropped_link_down;
      return;
    }
    std::vector<RouterIx> receivers;
    if (op.to_router == kNoRouter) {
      for (RouterIx r : topo.routers_on(op.subnet))
        if (r != sender) receivers.push_back(r);
    } else {
      RouterIx to = static_cast<RouterIx>(op.to_router);
      if (!topo.attached(to, op.subnet))
        throw std::logic_error("unicast target not attached to subnet");
      receivers.push_back(to);
    }
    for (RouterIx to : receivers) {
      if (loss[op.subnet] > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (u(rng) < loss[op.subnet]) {
          ++trace.dropped_loss;
          continue;
        }
      }
      QItem it;
      it.at = now + latency[op.subnet];
      it.seq = next_seq++;
      it.kind = QItem::Kind::Deliver;
      it.to = to;
      it.from = sender;
      it.subnet = op.subnet;
      it.msg = op.msg;
      queue.push(std::move(it));
    }
  };

  auto flush_effects = [&](Tick now, RouterIx self, Context& ctx) {
    for (const SendOp& op : ctx.sends) do_send(now, self, op);
    for (const TimerOp& t : ctx.timers) {
      QItem it;
      it.at = now + t.delay;
      it.seq = next_seq++;
      it.kind = QItem::Kind::Timer;
      it.router = self;
      it.incarnation = incarnation[self];
      it.tag = t.tag;
      it.payload = t.payload;
      queue.push(std::move(it));
    }
    for (const std::string& n : ctx.notes) log(now, topo.router_names[self], n);
  };

  auto init_router = [&](Tick now, RouterIx r) {
    behavior[r] = make(topo, r);
    Context ctx(topo, now, r);
    behavior[r]->on_init(ctx);
    flush_effects(now, r, ctx);
  };

  // Adjacency bookkeeping: neighbor sets before/after a topology mutation.
  auto neighbor_sets = [&]() {
    std::vector<std::vector<std::pair<RouterIx, SubnetIx>>> ns(R);
    for (RouterIx r = 0; r < R; ++r) ns[r] = topo.neighbors(r);
    return ns;
  };

  auto notify_subnet_change = [&](Tick now, SubnetIx s, bool up,
                                  const std::vector<std::vector<std::pair<RouterIx, SubnetIx>>>& before,
                                  const std::vector<std::vector<std::pair<RouterIx, SubnetIx>>>& after,
                                  RouterIx skip) {
    for (RouterIx r : topo.routers_on(s)) {
      if (r == skip || !topo.router_alive[r] || !behavior[r]) continue;
      AdjacencyEvent ev;
      ev.subnet = s;
      ev.up = up;
      ev.attached_to_me = true;
      auto routers_of = [](const std::vector<std::pair<RouterIx, SubnetIx>>& v) {
        std::vector<RouterIx> out;
        for (const auto& [n, sn] : v)
          if (out.empty() || out.back() != n) out.push_back(n); // v is sorted by router
        return out;
      };
      std::vector<RouterIx> was = routers_of(before[r]);
      std::vector<RouterIx> now_r = routers_of(after[r]);
      std::set_difference(was.begin(), was.end(), now_r.begin(), now_r.end(),
                          std::back_inserter(ev.lost_neighbors));
      std::set_difference(now_r.begin(), now_r.end(), was.begin(), was.end(),
                          std::back_inserter(ev.gained_neighbors));
      Context ctx(topo, now, r);
      behavior[r]->on_adjacency(ev, ctx);
      flush_effects(now, r, ctx);
    }
  };

  auto apply_script = [&](Tick now, const ScriptEvent& ev) {
    switch (ev.kind) {
      case ScriptEvent::Kind::LinkDown:
      case ScriptEvent::Kind::LinkUp: {
        SubnetIx s = ev.a;
        bool up = ev.kind == ScriptEvent::Kind::LinkUp;
        if (topo.link_up[s] == up) return;
        auto before = neighbor_sets();
        topo.link_up[s] = up;
        auto after = neighbor_sets();
        log(now, "-", std::string("link ") + topo.subnet_names[s] + (up ? " up" : " down"));
        notify_subnet_change(now, s, up && topo.subnet_effectively_up(s), before, after, R);
        return;
      }
      case ScriptEvent::Kind::RouterDown: {
        RouterIx r = ev.a;
        if (!topo.router_alive[r]) return;
        auto before = neighbor_sets();
        topo.router_alive[r] = false;
        ++incarnation[r];
        behavior[r].reset();
        auto after = neighbor_sets();
        log(now, topo.router_names[r], "router down");
        for (InterfaceIx i : topo.router_interfaces[r])
          notify_subnet_change(now, topo.interface_subnet[i], false, before, after, r);
        return;
      }
      case ScriptEvent::Kind::RouterUp: {
        RouterIx r = ev.a;
        if (topo.router_alive[r]) return;
        auto before = neighbor_sets();
        topo.router_alive[r] = true;
        ++incarnation[r];
        auto after = neighbor_sets();
        log(now, topo.router_names[r], "router up");
        init_router(now, r);
        for (InterfaceIx i : topo.router_interfaces[r]) {
          SubnetIx s = topo.interface_subnet[i];
          notify_subnet_change(now, s, topo.subnet_effectively_up(s), before, after, r);
        }
        return;
      }
      case ScriptEvent::Kind::DataSend: {
        RouterIx r = ev.a;
        if (!topo.router_alive[r] || !behavior[r]) return;
        log(now, topo.router_names[r], "data toward " + topo.router_names[ev.b]);
        Context ctx(topo, now, r);
        behavior[r]->on_data(ev.b, ctx);
        flush_effects(now, r, ctx);
        return;
      }
      case ScriptEvent::Kind::Latency:
        if (ev.x < 1.0) throw std::invalid_argument("scripted latency must be >= 1");
        latency[ev.a] = static_cast<Tick>(ev.x);
        return;
      case ScriptEvent::Kind::Loss:
        if (ev.x < 0.0 || ev.x > 1.0) throw std::invalid_argument("scripted loss out of [0,1]");
        loss[ev.a] = ev.x;
        return;
    }
  };

  // Script events enter the queue first so they win every same-tick tie.
  for (const ScriptEvent& ev : script) {
    if (ev.at < 0 || ev.at > horizon) throw std::invalid_argument("script event outside horizon");
    QItem it;
    it.at = ev.at;
    it.seq = next_seq++;
    it.kind = QItem::Kind::Script;
    it.ev = ev;
    queue.push(std::move(it));
  }

  for (RouterIx r = 0; r < R; ++r)
    if (topo.router_alive[r]) init_router(0, r);

  for (Tick t = 0; t <= horizon; ++t) {
    while (!queue.empty() && queue.top().at == t) {
      QItem it = queue.top();
      queue.pop();
      switch (it.kind) {
        case QItem::Kind::Script:
          apply_script(t, it.ev);
          break;
        case QItem::Kind::Deliver: {
          if (!topo.subnet_effectively_up(it.subnet)) {
            ++trace.dropped_link_down;
            break;
          }
          if (!topo.router_alive[it.to] || !behavior[it.to]) {
            ++trace.dropped_dead_router;
            break;
          }
          InterfaceIx in_if = 0;
          bool found = false;
          for (InterfaceIx i : topo.router_interfaces[it.to])
            if (topo.interface_subnet[i] == it.subnet) {
              in_if = i;
              found = true;
              break;
            }
          if (!found) { // receiver no longer on that subnet (cannot happen with static wiring)
            ++trace.dropped_link_down;
            break;
          }
          Context ctx(topo, t, it.to);
          behavior[it.to]->on_message(it.msg, in_if, it.from, ctx);
          flush_effects(t, it.to, ctx);
          break;
        }
        case QItem::Kind::Timer: {
          if (!topo.router_alive[it.router] || !behavior[it.router]) break;
          if (incarnation[it.router] != it.incarnation) break; // timer of a previous life
          Context ctx(topo, t, it.router);
          behavior[it.router]->on_timer(it.tag, it.payload, ctx);
          flush_effects(t, it.router, ctx);
          break;
        }
      }
    }
    if (mode == Mode::Sync) {
      for (RouterIx r = 0; r < R; ++r) {
        if (!topo.router_alive[r] || !behavior[r]) continue;
        Context ctx(topo, t, r);
        behavior[r]->on_round(ctx);
        flush_effects(t, r, ctx);
      }
    }
    auto& snap = trace.snapshots[static_cast<std::size_t>(t)];
    snap.resize(R);
    for (RouterIx r = 0; r < R; ++r) {
      snap[r].clear();
      if (topo.router_alive[r] && behavior[r]) behavior[r]->snapshot(snap[r]);
    }
  }
  last_topo_ = std::move(topo);
  return trace;
}

std::string Trace::to_csv(const Topology& topo) const {
  std::ostringstream os;
  os << "tick,router,dest_kind,dest,metric,next_hop,valid,seq,fd,aux,state\n";
  for (std::size_t t = 0; t < snapshots.size(); ++t) {
    for (std::size_t r = 0; r < snapshots[t].size(); ++r) {
      for (const Row& row : snapshots[t][r]) {
        os << t << ',' << topo.router_names[r] << ','
           << (row.dest_kind == Row::DestKind::Subnet ? "subnet" : "router") << ','
           << (row.dest_kind == Row::DestKind::Subnet ? topo.subnet_names[row.dest]
                                                      : topo.router_names[row.dest])
           << ',' << fmt_metric(row.metric) << ',';
        if (row.next_hop == kNoRouter)
          os << '-';
        else if (row.next_hop == kLocal)
          os << "local";
        else
          os << topo.router_names[static_cast<RouterIx>(row.next_hop)];
        os << ',' << (row.valid ? 1 : 0) << ',' << row.seq << ',' << row.fd << ','
           << row.aux << ',' << row.state << '\n';
      }
    }
  }
  os << "# messages_sent=" << messages_sent << " dropped_link_down=" << dropped_link_down
     << " dropped_loss=" << dropped_loss << " dropped_dead_router=" << dropped_dead_router
     << '\n';
  for (const auto& [k, v] : sent_by_kind) os << "# sent " << k << '=' << v << '\n';
  for (const std::string& e : event_log) os << "# " << e << '\n';
  return os.str();
}

} // namespace dvsim
