#include "dvsim/report.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "json.hpp"

namespace dvsim {

namespace {

// Cheapest router-to-router distances under additive per-subnet costs
// (Babel's metric space; hop count when every cost is 1).
std::vector<std::vector<std::int64_t>> weighted_router_dist(
    const Topology& topo, const std::vector<std::int64_t>& link_cost) {
  std::size_t n = topo.num_routers();
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, kMetricInf));
  for (RouterIx r = 0; r < n; ++r)
    if (topo.router_alive[r]) d[r][r] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (RouterIx r = 0; r < n; ++r) {
      if (!topo.router_alive[r]) continue;
      for (const auto& [nb, via] : topo.neighbors(r)) {
        for (RouterIx t = 0; t < n; ++t) {
          if (d[nb][t] == kMetricInf) continue;
          std::int64_t cand = d[nb][t] + link_cost[via];
          if (cand < d[r][t]) {
            d[r][t] = cand;
            changed = true;
          }
        }
      }
    }
  }
  return d;
}

std::map<std::uint32_t, const Row*> index_rows(const std::vector<Row>& rows,
                                               Row::DestKind kind) {
  std::map<std::uint32_t, const Row*> out;
  for (const Row& row : rows)
    if (row.dest_kind == kind) out[row.dest] = &row;
  return out;
}

KValues k_from_params(const Params& p) {
  KValues k;
  k.k1 = static_cast<std::uint32_t>(p.get_int("k1", 1));
  k.k2 = static_cast<std::uint32_t>(p.get_int("k2", 0));
  k.k3 = static_cast<std::uint32_t>(p.get_int("k3", 1));
  k.k4 = static_cast<std::uint32_t>(p.get_int("k4", 0));
  k.k5 = static_cast<std::uint32_t>(p.get_int("k5", 0));
  return k;
}

void compare_rip_family(const Topology& topo, const std::vector<std::vector<Row>>& snap,
                        std::vector<std::string>& out) {
  ShortestPaths sp = shortest_paths(topo);
  for (RouterIx r = 0; r < topo.num_routers(); ++r) {
    if (!topo.router_alive[r]) continue;
    auto rows = index_rows(snap[r], Row::DestKind::Subnet);
    for (SubnetIx s = 0; s < topo.num_subnets(); ++s) {
      std::int64_t want = sp.subnet_dist[r][s];
      bool reachable = want != kMetricInf && want < kRipInfinity;
      auto it = rows.find(s);
      bool have = it != rows.end() && it->second->valid;
      if (reachable && (!have || it->second->metric != want))
        out.push_back(topo.router_names[r] + " -> " + topo.subnet_names[s] + ": want " +
                      std::to_string(want) + ", have " +
                      (have ? std::to_string(it->second->metric) : std::string("none")));
      else if (!reachable && have)
        out.push_back(topo.router_names[r] + " -> " + topo.subnet_names[s] +
                      ": want unreachable, have " + std::to_string(it->second->metric));
    }
  }
}

// On-demand routes are flood-geometry artifacts, not converged shortest
// paths: the request target consumes the flood instead of rebroadcasting it,
// so reverse routes can legitimately exceed the all-pairs optimum, and unused
// routes age out rather than re-optimize.  What can never happen: a route
// SHORTER than the optimum (no such path exists) or a valid route to a
// router the topology cannot reach (a missed invalidation).
void compare_aodv(const Topology& topo, const std::vector<std::vector<Row>>& snap,
                  std::vector<std::string>& out) {
  ShortestPaths sp = shortest_paths(topo);
  for (RouterIx r = 0; r < topo.num_routers(); ++r) {
    if (!topo.router_alive[r]) continue;
    for (const Row& row : snap[r]) {
      if (row.dest_kind != Row::DestKind::Router || !row.valid) continue;
      std::int64_t want = sp.router_dist[r][row.dest];
      if (want == kMetricInf)
        out.push_back(topo.router_names[r] + " -> " + topo.router_names[row.dest] +
                      ": want unreachable, have " + std::to_string(row.metric));
      else if (row.metric < want)
        out.push_back(topo.router_names[r] + " -> " + topo.router_names[row.dest] +
                      ": want >= " + std::to_string(want) + ", have " +
                      std::to_string(row.metric));
    }
  }
}

void compare_eigrp(const Topology& topo, const Scenario& sc,
                   const std::vector<std::vector<Row>>& snap,
                   std::vector<std::string>& out) {
  KValues k = k_from_params(sc.params);
  std::int64_t hop_cap = sc.params.get_int("hop_cap", 100);
  EigrpOracle oracle = eigrp_fixpoint(topo, sc.cost, k, hop_cap);
  for (RouterIx r = 0; r < topo.num_routers(); ++r) {
    if (!topo.router_alive[r]) continue;
    auto rows = index_rows(snap[r], Row::DestKind::Subnet);
    for (SubnetIx s = 0; s < topo.num_subnets(); ++s) {
      std::uint64_t want = oracle.metric[r][s];
      auto it = rows.find(s);
      bool have = it != rows.end() && it->second->valid;
      if (want != kCompositeInf &&
          (!have || it->second->metric != static_cast<std::int64_t>(want)))
        out.push_back(topo.router_names[r] + " -> " + topo.subnet_names[s] + ": want " +
                      std::to_string(want) + ", have " +
                      (have ? std::to_string(it->second->metric) : std::string("none")));
      else if (want == kCompositeInf && have)
        out.push_back(topo.router_names[r] + " -> " + topo.subnet_names[s] +
                      ": want unreachable, have " + std::to_string(it->second->metric));
    }
  }
}

void compare_babel(const Topology& topo, const Scenario& sc,
                   const std::vector<std::vector<Row>>& snap,
                   std::vector<std::string>& out) {
  auto wd = weighted_router_dist(topo, sc.link_cost);
  for (RouterIx r = 0; r < topo.num_routers(); ++r) {
    if (!topo.router_alive[r]) continue;
    auto rows = index_rows(snap[r], Row::DestKind::Router);
    for (RouterIx t = 0; t < topo.num_routers(); ++t) {
      if (!topo.router_alive[t]) continue;
      std::int64_t want = wd[r][t];
      auto it = rows.find(t);
      bool have = it != rows.end() && it->second->valid;
      if (want != kMetricInf && (!have || it->second->metric != want))
        out.push_back(topo.router_names[r] + " -> " + topo.router_names[t] + ": want " +
                      std::to_string(want) + ", have " +
                      (have ? std::to_string(it->second->metric) : std::string("none")));
      else if (want == kMetricInf && have)
        out.push_back(topo.router_names[r] + " -> " + topo.router_names[t] +
                      ": want unreachable, have " + std::to_string(it->second->metric));
    }
  }
}

} // namespace

RunReport analyze_run(const Topology& final_topo, const Scenario& sc,
                      const std::string& protocol, const Trace& trace) {
  RunReport rep;
  if (trace.snapshots.empty()) return rep;

  Tick last = static_cast<Tick>(trace.snapshots.size()) - 1;
  rep.stable_from = last;
  for (Tick t = last - 1; t >= 0; --t) {
    if (trace.snapshots[t] == trace.snapshots[last])
      rep.stable_from = t;
    else
      break;
  }

  rep.episodes = assemble_episodes(find_cycles(trace));

  const auto& fin = trace.snapshots.back();
  if (protocol == "rip" || protocol == "rip-mti" || protocol == "rip-tree")
    compare_rip_family(final_topo, fin, rep.oracle_mismatches);
  else if (protocol == "aodv")
    compare_aodv(final_topo, fin, rep.oracle_mismatches);
  else if (protocol == "eigrp")
    compare_eigrp(final_topo, sc, fin, rep.oracle_mismatches);
  else if (protocol == "babel")
    compare_babel(final_topo, sc, fin, rep.oracle_mismatches);

  if (protocol == "aodv")
    rep.violations = check_aodv_monotonicity(trace);
  else if (protocol == "eigrp")
    rep.violations = check_eigrp_invariants(trace);
  else if (protocol == "babel")
    rep.violations = check_babel_invariants(trace);
  return rep;
}

void write_report_json(std::ostream& os, const Topology& final_topo, const Scenario& sc,
                       const std::string& protocol, const Trace& trace) {
  RunReport rep = analyze_run(final_topo, sc, protocol, trace);
  nlohmann::json j;
  j["protocol"] = protocol;
  j["ticks"] = trace.snapshots.size();
  j["stable_from"] = rep.stable_from;
  j["messages_sent"] = trace.messages_sent;
  j["sent_by_kind"] = trace.sent_by_kind;
  j["dropped"] = {{"link_down", trace.dropped_link_down},
                  {"loss", trace.dropped_loss},
                  {"dead_router", trace.dropped_dead_router}};
  j["loop_episodes"] = nlohmann::json::array();
  for (const Episode& e : rep.episodes) {
    nlohmann::json je;
    je["start"] = e.start;
    je["end"] = e.end;
    je["dest"] = e.kind == Row::DestKind::Subnet ? final_topo.subnet_names[e.dest]
                                                 : final_topo.router_names[e.dest];
    je["participants"] = nlohmann::json::array();
    for (RouterIx r : e.participants) je["participants"].push_back(final_topo.router_names[r]);
    j["loop_episodes"].push_back(je);
  }
  j["oracle_mismatches"] = rep.oracle_mismatches;
  j["violations"] = nlohmann::json::array();
  for (const Violation& v : rep.violations)
    j["violations"].push_back({{"tick", v.tick},
                               {"router", final_topo.router_names[v.router]},
                               {"dest", v.dest},
                               {"what", v.what}});
  j["annotations"] = trace.event_log;
  os << j.dump(2) << "\n";
}

} // namespace dvsim
