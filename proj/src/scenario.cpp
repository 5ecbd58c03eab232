#include "dvsim/scenario.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dvsim/proto/aodv.hpp"
#include "dvsim/proto/babel.hpp"
#include "dvsim/proto/eigrp.hpp"
#include "dvsim/proto/rip.hpp"
#include "dvsim/proto/ripmti.hpp"
#include "dvsim/proto/riptree.hpp"

namespace dvsim {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  auto pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(int lineno, const std::string& what) {
  throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": " + what);
}

} // namespace

Scenario parse_scenario(std::istream& in) {
  // First pass: collect raw section lines, since interfaces referenced by
  // [subnets] must already know their owning router from [routers].
  struct RawLine {
    int no;
    std::string text;
  };
  std::map<std::string, std::vector<RawLine>> sections;
  std::string cur;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(lineno, "unterminated section header");
      cur = t.substr(1, t.size() - 2);
      if (cur != "routers" && cur != "subnets" && cur != "events" && cur != "params")
        fail(lineno, "unknown section [" + cur + "]");
      continue;
    }
    if (cur.empty()) fail(lineno, "content before any section header");
    sections[cur].push_back({lineno, t});
  }

  Scenario sc;
  // interface name -> owning router
  std::map<std::string, RouterIx> iface_owner;
  for (const auto& rl : sections["routers"]) {
    auto eq = rl.text.find('=');
    if (eq == std::string::npos) fail(rl.no, "expected NAME = interfaces...");
    std::string name = trim(rl.text.substr(0, eq));
    RouterIx r = sc.topo.add_router(name);
    for (const std::string& ifname : split_ws(trim(rl.text.substr(eq + 1)))) {
      if (iface_owner.count(ifname)) fail(rl.no, "interface " + ifname + " listed twice");
      iface_owner[ifname] = r;
    }
  }

  for (const auto& rl : sections["subnets"]) {
    auto eq = rl.text.find('=');
    if (eq == std::string::npos) fail(rl.no, "expected NAME = interfaces/attrs...");
    std::string name = trim(rl.text.substr(0, eq));
    SubnetIx s = sc.topo.add_subnet(name);
    sc.latency.push_back(1);
    sc.loss.push_back(0.0);
    DualVector v;
    v.bandwidth = 100;
    v.delay = 10;
    sc.cost.push_back(v);
    sc.link_cost.push_back(1);
    for (const std::string& tok : split_ws(trim(rl.text.substr(eq + 1)))) {
      auto a = tok.find('=');
      if (a == std::string::npos) {
        auto it = iface_owner.find(tok);
        if (it == iface_owner.end()) fail(rl.no, "interface " + tok + " not owned by any router");
        sc.topo.add_interface(tok, it->second, s);
        iface_owner.erase(it); // consumed: an interface sits on exactly one subnet
        continue;
      }
      std::string key = tok.substr(0, a);
      std::string val = tok.substr(a + 1);
      try {
        if (key == "latency") sc.latency[s] = std::stoll(val);
        else if (key == "loss") sc.loss[s] = std::stod(val);
        else if (key == "bw") sc.cost[s].bandwidth = std::stoull(val);
        else if (key == "delay") sc.cost[s].delay = std::stoull(val);
        else if (key == "load") sc.cost[s].load = static_cast<std::uint32_t>(std::stoul(val));
        else if (key == "rel") sc.cost[s].reliability = static_cast<std::uint32_t>(std::stoul(val));
        else if (key == "cost") sc.link_cost[s] = std::stoll(val);
        else fail(rl.no, "unknown subnet attribute " + key);
      } catch (const std::invalid_argument&) {
        fail(rl.no, "bad value for " + key + ": " + val);
      }
    }
  }
  for (const auto& [ifname, r] : iface_owner) {
    (void)r;
    throw std::invalid_argument("interface " + ifname + " is not plugged into any subnet");
  }
  sc.topo.validate();

  for (const auto& rl : sections["events"]) {
    auto toks = split_ws(rl.text);
    if (toks.size() < 3) fail(rl.no, "expected TICK VERB args...");
    ScriptEvent ev;
    try {
      ev.at = std::stoll(toks[0]);
    } catch (const std::invalid_argument&) {
      fail(rl.no, "bad tick " + toks[0]);
    }
    const std::string& verb = toks[1];
    if (verb == "link") {
      if (toks.size() != 4 || (toks[3] != "up" && toks[3] != "down"))
        fail(rl.no, "expected: TICK link SUBNET up|down");
      ev.kind = toks[3] == "up" ? ScriptEvent::Kind::LinkUp : ScriptEvent::Kind::LinkDown;
      ev.a = sc.topo.subnet(toks[2]);
    } else if (verb == "router") {
      if (toks.size() != 4 || (toks[3] != "up" && toks[3] != "down"))
        fail(rl.no, "expected: TICK router ROUTER up|down");
      ev.kind = toks[3] == "up" ? ScriptEvent::Kind::RouterUp : ScriptEvent::Kind::RouterDown;
      ev.a = sc.topo.router(toks[2]);
    } else if (verb == "send") {
      if (toks.size() != 4) fail(rl.no, "expected: TICK send SRC DEST");
      ev.kind = ScriptEvent::Kind::DataSend;
      ev.a = sc.topo.router(toks[2]);
      ev.b = sc.topo.router(toks[3]);
    } else if (verb == "latency") {
      if (toks.size() != 4) fail(rl.no, "expected: TICK latency SUBNET TICKS");
      ev.kind = ScriptEvent::Kind::Latency;
      ev.a = sc.topo.subnet(toks[2]);
      ev.x = std::stod(toks[3]);
    } else if (verb == "loss") {
      if (toks.size() != 4) fail(rl.no, "expected: TICK loss SUBNET P");
      ev.kind = ScriptEvent::Kind::Loss;
      ev.a = sc.topo.subnet(toks[2]);
      ev.x = std::stod(toks[3]);
    } else {
      fail(rl.no, "unknown event verb " + verb);
    }
    sc.script.push_back(ev);
  }

  for (const auto& rl : sections["params"]) {
    auto eq = rl.text.find('=');
    if (eq == std::string::npos) fail(rl.no, "expected KEY = VALUE");
    sc.params.set(trim(rl.text.substr(0, eq)), trim(rl.text.substr(eq + 1)));
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file: " + path);
  return parse_scenario(f);
}

void configure_engine(Engine& eng, const Scenario& sc) {
  for (SubnetIx s = 0; s < sc.topo.num_subnets(); ++s) {
    if (sc.latency[s] != 1) eng.set_subnet_latency(s, sc.latency[s]);
    if (sc.loss[s] != 0.0) eng.set_subnet_loss(s, sc.loss[s]);
  }
}

BehaviorFactory make_factory(const std::string& protocol, const Scenario& sc,
                             std::uint64_t seed) {
  Params params = sc.params;
  if (protocol == "rip")
    return [params](const Topology& t, RouterIx r) { return make_rip(t, r, params); };
  if (protocol == "rip-mti")
    return [params](const Topology& t, RouterIx r) { return make_ripmti(t, r, params); };
  if (protocol == "rip-tree")
    return [params](const Topology& t, RouterIx r) { return make_riptree(t, r, params); };
  if (protocol == "aodv")
    return [params](const Topology& t, RouterIx r) { return make_aodv(t, r, params); };
  if (protocol == "eigrp") {
    auto cost = sc.cost;
    return [params, cost](const Topology& t, RouterIx r) {
      return make_eigrp(t, r, params, cost);
    };
  }
  if (protocol == "babel") {
    auto link_cost = sc.link_cost;
    return [params, link_cost, seed](const Topology& t, RouterIx r) {
      return make_babel(t, r, params, link_cost, seed);
    };
  }
  throw std::invalid_argument("unknown protocol: " + protocol);
}

} // namespace dvsim
