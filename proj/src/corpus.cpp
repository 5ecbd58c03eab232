#include "dvsim/corpus.hpp"

#include <algorithm>
#include <random>

namespace dvsim {

Scenario make_corpus_scenario(const std::string& protocol, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x5DEECE66DULL);
  auto pick = [&rng](std::uint64_t n) -> std::uint32_t {
    return static_cast<std::uint32_t>(rng() % n);
  };

  Scenario sc;
  Topology& topo = sc.topo;
  std::uint32_t n = 4 + pick(17); // 4..20 routers
  for (std::uint32_t i = 0; i < n; ++i) topo.add_router("R" + std::to_string(i));

  std::uint32_t snum = 0;
  auto link = [&](RouterIx a, RouterIx b) {
    std::string name = "s" + std::to_string(snum++);
    SubnetIx s = topo.add_subnet(name);
    topo.add_interface(topo.router_names[a] + "." + name, a, s);
    topo.add_interface(topo.router_names[b] + "." + name, b, s);
    return s;
  };
  auto adjacent = [&](RouterIx a, RouterIx b) {
    for (const auto& [nb, via] : topo.neighbors(a)) {
      (void)via;
      if (nb == b) return true;
    }
    return false;
  };

  for (std::uint32_t i = 1; i < n; ++i) link(pick(i), i); // random spanning tree
  std::uint32_t extras = pick(n / 2 + 1);
  for (std::uint32_t e = 0; e < extras; ++e) {
    RouterIx a = pick(n), b = pick(n);
    if (a != b && !adjacent(a, b)) link(a, b);
  }
  std::uint32_t stubs = 1 + pick(3);
  for (std::uint32_t k = 0; k < stubs; ++k) {
    RouterIx r = pick(n);
    std::string name = "stub" + std::to_string(k);
    SubnetIx s = topo.add_subnet(name);
    topo.add_interface(topo.router_names[r] + "." + name, r, s);
  }
  topo.validate();

  std::size_t ns = topo.num_subnets();
  sc.latency.assign(ns, 1);
  sc.loss.assign(ns, 0.0);
  sc.link_cost.assign(ns, 1);
  sc.cost.resize(ns);
  for (SubnetIx s = 0; s < ns; ++s) {
    DualVector v;
    v.bandwidth = 10; // scaled inverse-bandwidth term
    v.delay = 1 + pick(10);
    v.load = 0;
    v.reliability = 255;
    v.hops = 0;
    v.unreachable = false;
    sc.cost[s] = v;
  }

  std::uint32_t flaps = 1 + pick(5);
  for (std::uint32_t f = 0; f < flaps; ++f) {
    SubnetIx s = pick(ns);
    Tick t = 40 + pick(111); // [40, 150]
    ScriptEvent down;
    down.at = t;
    down.kind = ScriptEvent::Kind::LinkDown;
    down.a = s;
    sc.script.push_back(down);
    if (pick(2) == 0) {
      ScriptEvent up;
      up.at = t + 20 + pick(80);
      up.kind = ScriptEvent::Kind::LinkUp;
      up.a = s;
      sc.script.push_back(up);
    }
  }

  if (protocol == "aodv") {
    std::uint32_t sends = 3 + pick(4);
    for (std::uint32_t k = 0; k < sends; ++k) {
      RouterIx src = pick(n), dst = pick(n);
      if (src == dst) continue;
      ScriptEvent ev;
      ev.at = 5 + pick(246);
      ev.kind = ScriptEvent::Kind::DataSend;
      ev.a = src;
      ev.b = dst;
      sc.script.push_back(ev);
    }
  }

  std::stable_sort(sc.script.begin(), sc.script.end(),
                   [](const ScriptEvent& a, const ScriptEvent& b) { return a.at < b.at; });
  return sc;
}

RunResult run_scenario(const Scenario& sc, const std::string& protocol, Mode mode,
                       Tick horizon, std::uint64_t seed) {
  Engine eng(sc.topo);
  configure_engine(eng, sc);
  BehaviorFactory factory = make_factory(protocol, sc, seed);
  RunResult out;
  out.trace = eng.run(factory, sc.script, mode, horizon, seed);
  out.final_topo = eng.last_topo();
  return out;
}

} // namespace dvsim
