#include "dvsim/oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace dvsim {
namespace {

std::vector<std::vector<RouterIx>> live_adjacency(const Topology& topo) {
  std::vector<std::vector<RouterIx>> adj(topo.router_names.size());
  for (RouterIx r = 0; r < topo.router_names.size(); ++r) {
    if (!topo.router_alive[r]) continue;
    for (const auto& [n, s] : topo.neighbors(r)) {
      (void)s;
      if (adj[r].empty() || adj[r].back() != n) adj[r].push_back(n);
    }
  }
  return adj;
}

void bfs_from(RouterIx src, const std::vector<std::vector<RouterIx>>& adj,
              std::vector<std::int64_t>& dist) {
  dist.assign(adj.size(), kMetricInf);
  dist[src] = 0;
  std::deque<RouterIx> q{src};
  while (!q.empty()) {
    RouterIx u = q.front();
    q.pop_front();
    for (RouterIx v : adj[u]) {
      if (dist[v] == kMetricInf) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    }
  }
}

void subnet_rows_from_router_rows(const Topology& topo, ShortestPaths& sp) {
  const std::size_t nr = topo.router_names.size();
  const std::size_t ns = topo.subnet_names.size();
  sp.subnet_dist.assign(nr, std::vector<std::int64_t>(ns, kMetricInf));
  for (RouterIx r = 0; r < nr; ++r) {
    if (!topo.router_alive[r]) continue;
    for (SubnetIx s = 0; s < ns; ++s) {
      if (!topo.subnet_effectively_up(s)) continue;
      std::int64_t best = kMetricInf;
      for (RouterIx onr : topo.routers_on(s))
        best = std::min(best, sp.router_dist[r][onr]);
      sp.subnet_dist[r][s] = best;
    }
  }
}

std::uint64_t dest_key(Row::DestKind k, std::uint32_t dest) {
  return (static_cast<std::uint64_t>(k) << 32) | dest;
}

// Cycles of the per-destination next-hop graph inside one snapshot.
void cycles_in_snapshot(const std::vector<std::vector<Row>>& snap, Tick tick,
                        std::vector<CycleRecord>& out) {
  // dest key -> (router -> next hop)
  std::unordered_map<std::uint64_t, std::unordered_map<std::uint32_t, std::uint32_t>> next;
  for (std::uint32_t r = 0; r < snap.size(); ++r)
    for (const Row& row : snap[r])
      if (row.valid && row.next_hop >= 0)
        next[dest_key(row.dest_kind, row.dest)][r] = static_cast<std::uint32_t>(row.next_hop);

  for (auto& [key, hop] : next) {
    std::unordered_map<std::uint32_t, int> color; // 0 new, 1 on stack, 2 done
    for (auto& [start, unused] : hop) {
      (void)unused;
      if (color[start] != 0) continue;
      std::vector<std::uint32_t> path;
      std::uint32_t u = start;
      while (true) {
        color[u] = 1;
        path.push_back(u);
        auto it = hop.find(u);
        if (it == hop.end() || color[it->second] == 2) break;
        if (color[it->second] == 1) { // found a cycle: suffix of path from it->second
          CycleRecord rec;
          rec.tick = tick;
          rec.kind = static_cast<Row::DestKind>(key >> 32);
          rec.dest = static_cast<std::uint32_t>(key);
          auto at = std::find(path.begin(), path.end(), it->second);
          for (auto p = at; p != path.end(); ++p) rec.participants.push_back(*p);
          std::sort(rec.participants.begin(), rec.participants.end());
          out.push_back(std::move(rec));
          break;
        }
        u = it->second;
      }
      for (std::uint32_t p : path) color[p] = 2;
    }
  }
  std::sort(out.begin(), out.end(), [](const CycleRecord& a, const CycleRecord& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.dest != b.dest) return a.dest < b.dest;
    return a.participants < b.participants;
  });
}

// DFS over loop continuations: `at` is a non-origin router reached after
// `used` hops that left the origin through `first_out`.  A hop entering an
// origin-owned interface closes a simple loop.  Minimal simple loops never
// revisit a router, so visited routers are pruned; same-interface bounces are
// legal hops but can only lengthen a pair minimum, so they are skipped too.
void loop_dfs(const Topology& topo, RouterIx origin, RouterIx at, std::int64_t used,
              InterfaceIx first_out, std::int64_t max_metric, std::vector<char>& visited,
              std::map<std::pair<InterfaceIx, InterfaceIx>, std::int64_t>& best) {
  if (used >= max_metric) return;
  for (InterfaceIx out : topo.router_interfaces[at]) {
    SubnetIx s = topo.interface_subnet[out];
    for (InterfaceIx in : topo.subnet_interfaces[s]) {
      RouterIx owner = topo.interface_owner[in];
      if (owner == origin) {
        auto key = std::make_pair(first_out, in);
        auto it = best.find(key);
        if (it == best.end() || used + 1 < it->second) best[key] = used + 1;
        continue;
      }
      if (in == out || visited[owner]) continue;
      visited[owner] = 1;
      loop_dfs(topo, origin, owner, used + 1, first_out, max_metric, visited, best);
      visited[owner] = 0;
    }
  }
}

bool row_lookup(const std::vector<Row>& rows, Row::DestKind k, std::uint32_t dest, Row& out) {
  for (const Row& r : rows)
    if (r.dest_kind == k && r.dest == dest) {
      out = r;
      return true;
    }
  return false;
}

} // namespace

ShortestPaths shortest_paths(const Topology& topo) {
  ShortestPaths sp;
  const std::size_t nr = topo.router_names.size();
  auto adj = live_adjacency(topo);
  sp.router_dist.assign(nr, {});
  for (RouterIx r = 0; r < nr; ++r) {
    if (topo.router_alive[r]) {
      bfs_from(r, adj, sp.router_dist[r]);
    } else {
      sp.router_dist[r].assign(nr, kMetricInf);
    }
  }
  subnet_rows_from_router_rows(topo, sp);
  return sp;
}

ShortestPaths shortest_paths_parallel(const Topology& topo) {
  ShortestPaths sp;
  const std::size_t nr = topo.router_names.size();
  auto adj = live_adjacency(topo);
  sp.router_dist.assign(nr, {});
  std::int64_t n = static_cast<std::int64_t>(nr);
#pragma omp parallel for
  for (std::int64_t r = 0; r < n; ++r) {
    if (topo.router_alive[static_cast<RouterIx>(r)]) {
      bfs_from(static_cast<RouterIx>(r), adj, sp.router_dist[r]);
    } else {
      sp.router_dist[r].assign(nr, kMetricInf);
    }
  }
  subnet_rows_from_router_rows(topo, sp);
  return sp;
}

std::int64_t rip_diameter(const ShortestPaths& sp) {
  std::int64_t d = 0;
  for (const auto& row : sp.subnet_dist)
    for (std::int64_t m : row)
      if (m != kMetricInf) d = std::max(d, m);
  return d;
}

BfTable bf_k_rounds(const Topology& topo, int rounds) {
  const std::size_t nr = topo.router_names.size();
  const std::size_t ns = topo.subnet_names.size();
  BfTable t;
  t.metric.assign(nr, std::vector<std::int64_t>(ns, kRipInfinity));
  t.next_hop.assign(nr, std::vector<std::int32_t>(ns, kNoRouter));
  for (RouterIx r = 0; r < nr; ++r) {
    if (!topo.router_alive[r]) continue;
    for (InterfaceIx i : topo.router_interfaces[r]) {
      SubnetIx s = topo.interface_subnet[i];
      if (topo.subnet_effectively_up(s)) {
        t.metric[r][s] = 0;
        t.next_hop[r][s] = kLocal;
      }
    }
  }
  for (int round = 0; round < rounds; ++round) {
    auto prev = t.metric;
    for (RouterIx r = 0; r < nr; ++r) {
      if (!topo.router_alive[r]) continue;
      // neighbors() is sorted by router index: matches delivery order of the
      // synchronous engine, where lower-index routers' offers arrive first.
      std::int32_t prev_neighbor = -1;
      for (const auto& [n, via] : topo.neighbors(r)) {
        (void)via;
        if (static_cast<std::int32_t>(n) == prev_neighbor) continue; // dedup multi-subnet pairs
        prev_neighbor = static_cast<std::int32_t>(n);
        for (SubnetIx s = 0; s < ns; ++s) {
          std::int64_t cand = std::min<std::int64_t>(prev[n][s] + 1, kRipInfinity);
          if (cand < t.metric[r][s]) {
            t.metric[r][s] = cand;
            t.next_hop[r][s] = static_cast<std::int32_t>(n);
          }
        }
      }
    }
  }
  return t;
}

namespace {

EigrpOracle eigrp_fixpoint_impl(const Topology& topo, const std::vector<DualVector>& subnet_cost,
                                const KValues& k, std::int64_t hop_cap, bool parallel) {
  const std::size_t nr = topo.router_names.size();
  const std::size_t ns = topo.subnet_names.size();
  if (subnet_cost.size() != ns)
    throw std::invalid_argument("eigrp_fixpoint: one cost vector per subnet required");
  EigrpOracle out;
  DualVector unreach;
  unreach.unreachable = true;
  out.vec.assign(nr, std::vector<DualVector>(ns, unreach));
  out.metric.assign(nr, std::vector<std::uint64_t>(ns, kCompositeInf));
  for (RouterIx r = 0; r < nr; ++r) {
    if (!topo.router_alive[r]) continue;
    for (InterfaceIx i : topo.router_interfaces[r]) {
      SubnetIx s = topo.interface_subnet[i];
      if (!topo.subnet_effectively_up(s)) continue;
      DualVector v = subnet_cost[s];
      v.hops = 0;
      std::uint64_t m = composite_metric(v, k);
      if (m < out.metric[r][s]) {
        out.metric[r][s] = m;
        out.vec[r][s] = v;
      }
    }
  }
  // Round-based relaxation over the previous round's tables; stable update
  // order makes serial and parallel runs identical.
  for (std::size_t round = 0; round < nr * ns + 1; ++round) {
    auto prev_vec = out.vec;
    auto prev_metric = out.metric;
    bool changed = false;
    auto relax_router = [&](RouterIx r) {
      bool local = false;
      if (!topo.router_alive[r]) return local;
      for (const auto& [n, via] : topo.neighbors(r)) {
        for (SubnetIx s = 0; s < ns; ++s) {
          if (prev_metric[n][s] == kCompositeInf) continue;
          DualVector cand = compose_over_link(subnet_cost[via], prev_vec[n][s]);
          if (cand.hops > hop_cap) continue;
          std::uint64_t m = composite_metric(cand, k);
          if (m < out.metric[r][s]) {
            out.metric[r][s] = m;
            out.vec[r][s] = cand;
            local = true;
          }
        }
      }
      return local;
    };
    if (parallel) {
      std::int64_t n = static_cast<std::int64_t>(nr);
      bool any = false;
#pragma omp parallel for reduction(|| : any)
      for (std::int64_t r = 0; r < n; ++r) any = relax_router(static_cast<RouterIx>(r)) || any;
      changed = any;
    } else {
      for (RouterIx r = 0; r < nr; ++r) changed = relax_router(r) || changed;
    }
    if (!changed) break;
  }
  return out;
}

} // namespace

EigrpOracle eigrp_fixpoint(const Topology& topo, const std::vector<DualVector>& subnet_cost,
                           const KValues& k, std::int64_t hop_cap) {
  return eigrp_fixpoint_impl(topo, subnet_cost, k, hop_cap, false);
}

EigrpOracle eigrp_fixpoint_parallel(const Topology& topo, const std::vector<DualVector>& subnet_cost,
                                    const KValues& k, std::int64_t hop_cap) {
  return eigrp_fixpoint_impl(topo, subnet_cost, k, hop_cap, true);
}

std::vector<CycleRecord> find_cycles(const Trace& trace) {
  std::vector<CycleRecord> out;
  for (Tick t = 0; t < static_cast<Tick>(trace.snapshots.size()); ++t) {
    std::vector<CycleRecord> tick_out;
    cycles_in_snapshot(trace.snapshots[t], t, tick_out);
    for (auto& c : tick_out) out.push_back(std::move(c));
  }
  return out;
}

std::vector<CycleRecord> find_cycles_parallel(const Trace& trace) {
  const std::int64_t n = static_cast<std::int64_t>(trace.snapshots.size());
  std::vector<std::vector<CycleRecord>> per_tick(n);
#pragma omp parallel for
  for (std::int64_t t = 0; t < n; ++t)
    cycles_in_snapshot(trace.snapshots[t], t, per_tick[t]);
  std::vector<CycleRecord> out;
  for (auto& v : per_tick)
    for (auto& c : v) out.push_back(std::move(c));
  return out;
}

std::vector<Episode> assemble_episodes(const std::vector<CycleRecord>& cycles) {
  // dest key -> sorted tick -> participants
  std::map<std::uint64_t, std::map<Tick, std::set<RouterIx>>> by_dest;
  for (const auto& c : cycles) {
    auto& slot = by_dest[dest_key(c.kind, c.dest)][c.tick];
    slot.insert(c.participants.begin(), c.participants.end());
  }
  std::vector<Episode> out;
  for (auto& [key, ticks] : by_dest) {
    Episode cur;
    bool open = false;
    for (auto& [t, parts] : ticks) {
      if (open && t == cur.end + 1) {
        cur.end = t;
        cur.participants.insert(parts.begin(), parts.end());
        continue;
      }
      if (open) out.push_back(cur);
      cur = Episode{};
      cur.start = cur.end = t;
      cur.kind = static_cast<Row::DestKind>(key >> 32);
      cur.dest = static_cast<std::uint32_t>(key);
      cur.participants = parts;
      open = true;
    }
    if (open) out.push_back(cur);
  }
  std::sort(out.begin(), out.end(), [](const Episode& a, const Episode& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.dest != b.dest) return a.dest < b.dest;
    return a.kind < b.kind;
  });
  return out;
}

Tick convergence_tick(const Trace& trace,
                      const std::function<bool(const std::vector<std::vector<Row>>&)>& settled) {
  if (trace.snapshots.empty()) return -1;
  Tick last = static_cast<Tick>(trace.snapshots.size()) - 1;
  if (!settled(trace.snapshots[last])) return -1;
  Tick t = last;
  while (t > 0 && settled(trace.snapshots[t - 1])) --t;
  return t;
}

std::map<std::pair<InterfaceIx, InterfaceIx>, std::int64_t>
enumerate_simple_loop_minima(const Topology& topo, RouterIx origin, std::int64_t max_metric) {
  std::map<std::pair<InterfaceIx, InterfaceIx>, std::int64_t> best;
  if (origin >= topo.router_names.size()) throw std::out_of_range("unknown router");
  std::vector<char> visited(topo.router_names.size(), 0);
  for (InterfaceIx out : topo.router_interfaces[origin]) {
    SubnetIx s = topo.interface_subnet[out];
    for (InterfaceIx in : topo.subnet_interfaces[s]) {
      RouterIx owner = topo.interface_owner[in];
      if (owner == origin) continue; // immediate back-turn, not a loop
      visited[owner] = 1;
      loop_dfs(topo, origin, owner, 1, out, max_metric, visited, best);
      visited[owner] = 0;
    }
  }
  return best;
}

std::vector<Violation> check_aodv_monotonicity(const Trace& trace) {
  std::vector<Violation> out;
  for (Tick t = 0; t < static_cast<Tick>(trace.snapshots.size()); ++t) {
    const auto& snap = trace.snapshots[t];
    for (std::uint32_t r = 0; r < snap.size(); ++r) {
      for (const Row& row : snap[r]) {
        if (!row.valid || row.dest_kind != Row::DestKind::Router || row.next_hop < 0) continue;
        std::uint32_t v = static_cast<std::uint32_t>(row.next_hop);
        if (v >= snap.size() || v == row.dest) continue;
        Row vrow;
        if (!row_lookup(snap[v], Row::DestKind::Router, row.dest, vrow) || !vrow.valid) continue;
        bool ok = seq32_gt(vrow.seq, row.seq) ||
                  (vrow.seq == row.seq && vrow.metric < row.metric);
        if (!ok)
          out.push_back({t, r, row.dest,
                         "next hop (seq,hops) not lexicographically closer: self(" +
                             std::to_string(row.seq) + "," + std::to_string(row.metric) +
                             ") via(" + std::to_string(vrow.seq) + "," +
                             std::to_string(vrow.metric) + ")"});
      }
    }
  }
  return out;
}

std::vector<Violation> check_eigrp_invariants(const Trace& trace, std::size_t max_successors) {
  std::vector<Violation> out;
  for (Tick t = 0; t < static_cast<Tick>(trace.snapshots.size()); ++t) {
    const auto& snap = trace.snapshots[t];
    for (std::uint32_t r = 0; r < snap.size(); ++r) {
      for (const Row& row : snap[r]) {
        if (row.seq > max_successors)
          out.push_back({t, r, row.dest,
                         "successor set size " + std::to_string(row.seq) + " exceeds " +
                             std::to_string(max_successors)});
        if (!row.valid || row.state != 'P' || row.next_hop < 0) continue;
        if (row.aux >= row.fd)
          out.push_back({t, r, row.dest,
                         "reported distance " + std::to_string(row.aux) +
                             " not below feasible distance " + std::to_string(row.fd)});
      }
    }
  }
  return out;
}

std::vector<Violation> check_babel_invariants(const Trace& trace) {
  std::vector<Violation> out;
  // (router, source) -> last seen FD (seqno, metric)
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, std::int64_t>> fd;
  for (Tick t = 0; t < static_cast<Tick>(trace.snapshots.size()); ++t) {
    const auto& snap = trace.snapshots[t];
    for (std::uint32_t r = 0; r < snap.size(); ++r) {
      for (const Row& row : snap[r]) {
        if (row.dest_kind != Row::DestKind::Router) continue;
        if (row.aux == 0 && row.fd == 0) continue; // no FD recorded yet
        auto key = std::make_pair(r, row.dest);
        auto seq = static_cast<std::uint32_t>(row.aux);
        auto it = fd.find(key);
        if (it != fd.end()) {
          auto [oseq, ometric] = it->second;
          bool improved_or_equal =
              seq16_gt(seq, oseq) || (seq == oseq && row.fd <= ometric);
          if (!improved_or_equal)
            out.push_back({t, r, row.dest,
                           "feasibility distance worsened: (" + std::to_string(oseq) + "," +
                               std::to_string(ometric) + ") -> (" + std::to_string(seq) + "," +
                               std::to_string(row.fd) + ")"});
        }
        fd[key] = {seq, row.fd};
      }
    }
  }
  return out;
}

} // namespace dvsim
