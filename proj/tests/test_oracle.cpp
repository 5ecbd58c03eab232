#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <string>

#include "dvsim/corpus.hpp"
#include "dvsim/oracle.hpp"
#include "dvsim/scenario.hpp"
#include "dvsim/topology.hpp"

using namespace dvsim;

namespace {

Topology triangle() {
  Topology t;
  RouterIx a = t.add_router("A");
  RouterIx b = t.add_router("B");
  RouterIx c = t.add_router("C");
  SubnetIx ab = t.add_subnet("s_ab");
  SubnetIx bc = t.add_subnet("s_bc");
  SubnetIx ac = t.add_subnet("s_ac");
  SubnetIx n = t.add_subnet("n");
  t.add_interface("A.ab", a, ab);
  t.add_interface("A.ac", a, ac);
  t.add_interface("B.ab", b, ab);
  t.add_interface("B.bc", b, bc);
  t.add_interface("C.bc", c, bc);
  t.add_interface("C.ac", c, ac);
  t.add_interface("C.n", c, n);
  t.validate();
  return t;
}

// R0 - R1 - ... - R17 in a line; subnet c<i> joins R<i> and R<i+1>.
Topology chain18() {
  Topology t;
  for (int i = 0; i < 18; ++i) t.add_router("R" + std::to_string(i));
  for (int i = 0; i < 17; ++i) {
    SubnetIx s = t.add_subnet("c" + std::to_string(i));
    t.add_interface("R" + std::to_string(i) + ".r", static_cast<RouterIx>(i), s);
    t.add_interface("R" + std::to_string(i + 1) + ".l", static_cast<RouterIx>(i + 1), s);
  }
  t.validate();
  return t;
}

Row row(Row::DestKind kind, std::uint32_t dest, std::int64_t metric, std::int32_t nh,
        bool valid, std::uint32_t seq = 0, std::int64_t fd = 0, std::int64_t aux = 0,
        char state = ' ') {
  Row r;
  r.dest_kind = kind;
  r.dest = dest;
  r.metric = metric;
  r.next_hop = nh;
  r.valid = valid;
  r.seq = seq;
  r.fd = fd;
  r.aux = aux;
  r.state = state;
  return r;
}

std::string source_path(const char* rel) {
  return std::string(DVSIM_SOURCE_DIR) + "/" + rel;
}

} // namespace

TEST_CASE("hop-count shortest paths on the triangle") {
  Topology t = triangle();
  ShortestPaths sp = shortest_paths(t);
  RouterIx A = t.router("A"), B = t.router("B"), C = t.router("C");
  CHECK(sp.router_dist[A][A] == 0);
  CHECK(sp.router_dist[A][B] == 1);
  CHECK(sp.router_dist[A][C] == 1);
  CHECK(sp.router_dist[B][C] == 1);
  CHECK(sp.subnet_dist[A][t.subnet("s_ab")] == 0);
  CHECK(sp.subnet_dist[A][t.subnet("s_ac")] == 0);
  CHECK(sp.subnet_dist[A][t.subnet("s_bc")] == 1);
  CHECK(sp.subnet_dist[A][t.subnet("n")] == 1);
  CHECK(sp.subnet_dist[B][t.subnet("n")] == 1);
  CHECK(sp.subnet_dist[C][t.subnet("n")] == 0);
  CHECK(rip_diameter(sp) == 1);
}

TEST_CASE("dead routers and downed subnets drop out of the distance map") {
  Topology t = triangle();
  RouterIx A = t.router("A"), B = t.router("B"), C = t.router("C");

  SUBCASE("dead router") {
    t.router_alive[C] = false;
    ShortestPaths sp = shortest_paths(t);
    CHECK(sp.router_dist[A][C] == kMetricInf);
    CHECK(sp.subnet_dist[A][t.subnet("n")] == kMetricInf);
    CHECK(sp.router_dist[A][B] == 1); // unaffected pair
  }

  SUBCASE("downed subnet forces the long way round") {
    t.link_up[t.subnet("s_bc")] = false;
    ShortestPaths sp = shortest_paths(t);
    CHECK(sp.subnet_dist[A][t.subnet("s_bc")] == kMetricInf);
    CHECK(sp.router_dist[B][C] == 2); // B-A-C
    CHECK(sp.subnet_dist[B][t.subnet("n")] == 2);
    CHECK(rip_diameter(sp) == 2);
  }
}

TEST_CASE("cold-start synchronous relaxation") {
  Topology t = triangle();
  RouterIx A = t.router("A");
  SubnetIx s_ab = t.subnet("s_ab"), s_bc = t.subnet("s_bc"), n = t.subnet("n");

  BfTable bf0 = bf_k_rounds(t, 0);
  CHECK(bf0.metric[A][s_ab] == 0);
  CHECK(bf0.next_hop[A][s_ab] == kLocal);
  CHECK(bf0.metric[A][s_bc] == kRipInfinity);
  CHECK(bf0.next_hop[A][s_bc] == kNoRouter);

  BfTable bf1 = bf_k_rounds(t, 1);
  CHECK(bf1.metric[A][s_bc] == 1);
  CHECK(bf1.next_hop[A][s_bc] == t.router("B")); // lowest-index neighbor wins the tie
  CHECK(bf1.metric[A][n] == 1);
  CHECK(bf1.next_hop[A][n] == t.router("C"));

  // At the diameter the relaxation equals the true distance map and is a fixpoint.
  ShortestPaths sp = shortest_paths(t);
  std::int64_t d = rip_diameter(sp);
  BfTable bfd = bf_k_rounds(t, static_cast<int>(d));
  for (RouterIx r = 0; r < t.num_routers(); ++r)
    for (SubnetIx s = 0; s < t.num_subnets(); ++s)
      CHECK(bfd.metric[r][s] == sp.subnet_dist[r][s]);
  BfTable more = bf_k_rounds(t, static_cast<int>(d) + 5);
  CHECK(bfd.metric == more.metric);
  CHECK(bfd.next_hop == more.next_hop);
}

TEST_CASE("relaxation caps at the hop-count infinity") {
  Topology t = chain18();
  SubnetIx c0 = t.subnet("c0");
  BfTable bf = bf_k_rounds(t, 30);
  CHECK(bf.metric[15][c0] == 15);
  CHECK(bf.next_hop[15][c0] == 14);
  CHECK(bf.metric[16][c0] == kRipInfinity); // 16 == unreachable, no route installed
  CHECK(bf.next_hop[16][c0] == kNoRouter);
  CHECK(bf.metric[17][c0] == kRipInfinity);
  CHECK(bf.next_hop[17][c0] == kNoRouter);
}

TEST_CASE("composite-metric fixpoint on the square") {
  Scenario sc = load_scenario(source_path("scenarios/eigrp_vectors.scn"));
  Topology& t = sc.topo;
  RouterIx A = t.router("A"), B = t.router("B"), C = t.router("C"), D = t.router("D");
  SubnetIx n = t.subnet("n");
  KValues k;

  EigrpOracle pre = eigrp_fixpoint(t, sc.cost, k);
  CHECK(pre.metric[C][n] == 28160); // (100 + 10) * 256
  CHECK(pre.metric[B][n] == 29440); // over s_bc: (max(100,50), 10+5)
  CHECK(pre.metric[D][n] == 28928); // over s_cd: (max(100,10), 10+3)
  CHECK(pre.metric[A][n] == 32000); // via B beats via D (54784)

  t.link_up[t.subnet("s_bc")] = false;
  EigrpOracle post = eigrp_fixpoint(t, sc.cost, k);
  CHECK(post.metric[A][n] == 54784); // via D: (max(100,200), 13+1)
  CHECK(post.metric[B][n] == 57344); // via A via D, +s_ab
  CHECK(post.metric[C][n] == 28160);
  CHECK(post.metric[D][n] == 28928);
  t.link_up[t.subnet("s_bc")] = true;

  EigrpOracle capped = eigrp_fixpoint(t, sc.cost, k, 1);
  CHECK(capped.metric[B][n] == 29440);
  CHECK(capped.metric[D][n] == 28928);
  CHECK(capped.metric[A][n] == kCompositeInf); // two hops minimum
  CHECK(capped.vec[A][n].unreachable);

  std::vector<DualVector> short_cost(t.num_subnets() - 1);
  CHECK_THROWS_AS(eigrp_fixpoint(t, short_cost, k), std::invalid_argument);
}

TEST_CASE("forwarding cycles in snapshots") {
  Trace tr;
  tr.snapshots.resize(4);
  for (auto& snap : tr.snapshots) snap.resize(3);

  // tick 0: valid routes but no cycle (chain 2 -> 1 -> 0 -> local).
  tr.snapshots[0][0] = {row(Row::DestKind::Subnet, 5, 0, kLocal, true)};
  tr.snapshots[0][1] = {row(Row::DestKind::Subnet, 5, 1, 0, true)};
  tr.snapshots[0][2] = {row(Row::DestKind::Subnet, 5, 2, 1, true)};

  // tick 1: 0 <-> 1 two-cycle; router 2 feeds it but is not a participant.
  tr.snapshots[1][0] = {row(Row::DestKind::Subnet, 5, 3, 1, true)};
  tr.snapshots[1][1] = {row(Row::DestKind::Subnet, 5, 3, 0, true)};
  tr.snapshots[1][2] = {row(Row::DestKind::Subnet, 5, 4, 0, true)};

  // tick 2: three-cycle on dest 5 plus a separate two-cycle on dest 7.
  tr.snapshots[2][0] = {row(Row::DestKind::Subnet, 5, 3, 1, true),
                        row(Row::DestKind::Subnet, 7, 2, 2, true)};
  tr.snapshots[2][1] = {row(Row::DestKind::Subnet, 5, 3, 2, true)};
  tr.snapshots[2][2] = {row(Row::DestKind::Subnet, 5, 3, 0, true),
                        row(Row::DestKind::Subnet, 7, 2, 0, true)};

  // tick 3: the same shape as tick 1 but invalidated / local: no cycle.
  tr.snapshots[3][0] = {row(Row::DestKind::Subnet, 5, 3, 1, false)};
  tr.snapshots[3][1] = {row(Row::DestKind::Subnet, 5, 3, kLocal, true)};
  tr.snapshots[3][2] = {row(Row::DestKind::Router, 9, 1, 1, true)}; // edge into a routerless row

  std::vector<CycleRecord> got = find_cycles(tr);
  std::vector<CycleRecord> want = {
      {1, Row::DestKind::Subnet, 5, {0, 1}},
      {2, Row::DestKind::Subnet, 5, {0, 1, 2}},
      {2, Row::DestKind::Subnet, 7, {0, 2}},
  };
  CHECK(got == want);

  std::vector<Episode> eps = assemble_episodes(got);
  REQUIRE(eps.size() == 2);
  CHECK(eps[0].start == 1);
  CHECK(eps[0].end == 2);
  CHECK(eps[0].dest == 5);
  CHECK(eps[0].participants == std::set<RouterIx>{0, 1, 2});
  CHECK(eps[1].start == 2);
  CHECK(eps[1].end == 2);
  CHECK(eps[1].dest == 7);
  CHECK(eps[1].participants == std::set<RouterIx>{0, 2});
}

TEST_CASE("episodes split on gaps and keys") {
  std::vector<CycleRecord> cycles = {
      {1, Row::DestKind::Subnet, 5, {0, 1}},
      {2, Row::DestKind::Subnet, 5, {1, 2}},
      {2, Row::DestKind::Router, 5, {0, 2}}, // same dest id, different kind
      {4, Row::DestKind::Subnet, 5, {0, 1}}, // gap at tick 3: new episode
  };
  std::vector<Episode> eps = assemble_episodes(cycles);
  REQUIRE(eps.size() == 3);
  CHECK(eps[0].start == 1);
  CHECK(eps[0].end == 2);
  CHECK(eps[0].kind == Row::DestKind::Subnet);
  CHECK(eps[0].participants == std::set<RouterIx>{0, 1, 2});
  CHECK(eps[1].start == 2);
  CHECK(eps[1].end == 2);
  CHECK(eps[1].kind == Row::DestKind::Router);
  CHECK(eps[2].start == 4);
  CHECK(eps[2].end == 4);
  CHECK(eps[2].participants == std::set<RouterIx>{0, 1});
}

TEST_CASE("convergence tick scans from the tail") {
  auto metric_one = [](const std::vector<std::vector<Row>>& snap) {
    return !snap[0].empty() && snap[0][0].metric == 1;
  };
  auto mk = [](std::initializer_list<std::int64_t> metrics) {
    Trace tr;
    for (std::int64_t m : metrics)
      tr.snapshots.push_back({{row(Row::DestKind::Subnet, 0, m, kLocal, true)}});
    return tr;
  };
  CHECK(convergence_tick(mk({16, 16, 1, 1, 1}), metric_one) == 2);
  CHECK(convergence_tick(mk({1, 1, 1}), metric_one) == 0);
  CHECK(convergence_tick(mk({1, 1, 16}), metric_one) == -1);
  CHECK(convergence_tick(mk({16, 1, 16, 1, 1}), metric_one) == 3); // flicker resets the scan
}

TEST_CASE("minimal simple-loop metrics") {
  Topology t = triangle();
  using Key = std::pair<InterfaceIx, InterfaceIx>;
  InterfaceIx a_ab = t.interface("A.ab"), a_ac = t.interface("A.ac");

  // Out-and-back through the far router costs 2; around the triangle costs 3.
  std::map<Key, std::int64_t> a = enumerate_simple_loop_minima(t, t.router("A"));
  std::map<Key, std::int64_t> a_want = {
      {{a_ab, a_ab}, 2}, {{a_ab, a_ac}, 3}, {{a_ac, a_ab}, 3}, {{a_ac, a_ac}, 2}};
  CHECK(a == a_want);

  // The stub interface C.n can neither start nor close a loop.
  InterfaceIx c_bc = t.interface("C.bc"), c_ac = t.interface("C.ac");
  std::map<Key, std::int64_t> c = enumerate_simple_loop_minima(t, t.router("C"));
  std::map<Key, std::int64_t> c_want = {
      {{c_bc, c_bc}, 2}, {{c_bc, c_ac}, 3}, {{c_ac, c_bc}, 3}, {{c_ac, c_ac}, 2}};
  CHECK(c == c_want);

  // A tighter bound prunes the 3-hop loops.
  std::map<Key, std::int64_t> pruned = enumerate_simple_loop_minima(t, t.router("A"), 2);
  std::map<Key, std::int64_t> pruned_want = {{{a_ab, a_ab}, 2}, {{a_ac, a_ac}, 2}};
  CHECK(pruned == pruned_want);

  CHECK_THROWS_AS(enumerate_simple_loop_minima(t, 99), std::out_of_range);

  Topology pair;
  RouterIx pa = pair.add_router("A");
  RouterIx pb = pair.add_router("B");
  SubnetIx ab = pair.add_subnet("ab");
  pair.add_interface("A.ab", pa, ab);
  pair.add_interface("B.ab", pb, ab);
  pair.validate();
  std::map<Key, std::int64_t> two = enumerate_simple_loop_minima(pair, pa);
  std::map<Key, std::int64_t> two_want = {{{pair.interface("A.ab"), pair.interface("A.ab")}, 2}};
  CHECK(two == two_want);
}

TEST_CASE("next-hop (seq, hops) monotonicity checker") {
  auto trace_of = [](std::vector<std::vector<Row>> snap) {
    Trace tr;
    tr.snapshots.push_back(std::move(snap));
    return tr;
  };

  // Clean: strictly newer seq downstream, or same seq with fewer hops.
  Trace clean = trace_of({{row(Row::DestKind::Router, 2, 3, 1, true, 5)},
                          {row(Row::DestKind::Router, 2, 1, 2, true, 6)},
                          {}});
  CHECK(check_aodv_monotonicity(clean).empty());
  Trace closer = trace_of({{row(Row::DestKind::Router, 2, 3, 1, true, 5)},
                           {row(Row::DestKind::Router, 2, 2, 2, true, 5)},
                           {}});
  CHECK(check_aodv_monotonicity(closer).empty());

  // Violation: same seq, same hop count along the edge 0 -> 1.
  Trace stuck = trace_of({{row(Row::DestKind::Router, 2, 3, 1, true, 5)},
                          {row(Row::DestKind::Router, 2, 3, 2, true, 5)},
                          {}});
  std::vector<Violation> v = check_aodv_monotonicity(stuck);
  REQUIRE(v.size() == 1);
  CHECK(v[0].router == 0);
  CHECK(v[0].dest == 2);

  // Skips: next hop is the destination; next hop has no/invalid entry; subnet rows.
  Trace skips = trace_of({{row(Row::DestKind::Router, 1, 1, 1, true, 5),
                           row(Row::DestKind::Subnet, 0, 3, 1, true, 5)},
                          {row(Row::DestKind::Router, 2, 9, 2, true, 1)},
                          {row(Row::DestKind::Router, 2, 9, 1, false, 1)}});
  CHECK(check_aodv_monotonicity(skips).empty());

  // Sequence numbers compare in wraparound order.
  Trace wrapped = trace_of({{row(Row::DestKind::Router, 2, 3, 1, true, 0xFFFFFFF0u)},
                            {row(Row::DestKind::Router, 2, 9, 2, true, 3)},
                            {}});
  CHECK(check_aodv_monotonicity(wrapped).empty());
}

TEST_CASE("composite-metric invariant checker") {
  auto trace_of = [](std::vector<Row> rows) {
    Trace tr;
    tr.snapshots.push_back({std::move(rows)});
    return tr;
  };

  // Passive valid route: reported distance must sit strictly below own fd.
  CHECK(check_eigrp_invariants(trace_of({row(Row::DestKind::Subnet, 0, 100, 1, true, 1, 50, 30, 'P')}))
            .empty());
  std::vector<Violation> bad =
      check_eigrp_invariants(trace_of({row(Row::DestKind::Subnet, 0, 100, 1, true, 1, 50, 50, 'P')}));
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].what.find("feasible distance") != std::string::npos);

  // Active, invalid, and locally attached rows are exempt from the fd rule.
  CHECK(check_eigrp_invariants(trace_of({row(Row::DestKind::Subnet, 0, 100, 1, true, 1, 50, 99, 'A'),
                                         row(Row::DestKind::Subnet, 1, 100, 1, false, 1, 50, 99, 'P'),
                                         row(Row::DestKind::Subnet, 2, 0, kLocal, true, 1, 50, 99, 'P')}))
            .empty());

  // seq carries the successor count; more than max_successors is flagged on any row.
  std::vector<Violation> wide =
      check_eigrp_invariants(trace_of({row(Row::DestKind::Subnet, 0, 100, 1, false, 5, 0, 0, 'P')}));
  REQUIRE(wide.size() == 1);
  CHECK(wide[0].what.find("successor set size 5") != std::string::npos);
  CHECK(check_eigrp_invariants(trace_of({row(Row::DestKind::Subnet, 0, 100, 1, false, 5, 0, 0, 'P')}), 5)
            .empty());
}

TEST_CASE("feasibility-distance monotonicity checker") {
  auto seqfd = [](std::initializer_list<std::pair<std::int64_t, std::int64_t>> steps) {
    Trace tr;
    for (auto [seq, fd] : steps)
      tr.snapshots.push_back({{row(Row::DestKind::Router, 3, 1, 1, true, 0, fd, seq)}});
    return tr;
  };

  CHECK(check_babel_invariants(seqfd({{100, 5}, {100, 4}, {101, 50}, {101, 50}})).empty());

  std::vector<Violation> worse = check_babel_invariants(seqfd({{101, 50}, {101, 51}}));
  REQUIRE(worse.size() == 1);
  CHECK(worse[0].tick == 1);
  CHECK(worse[0].dest == 3);

  CHECK(check_babel_invariants(seqfd({{101, 50}, {100, 0}})).size() == 1); // seqno went backwards

  // 16-bit wraparound: 0 succeeds 65535.
  CHECK(check_babel_invariants(seqfd({{65535, 3}, {0, 10}})).empty());

  // (0, 0) means "no fd recorded": never a baseline, never a violation.
  CHECK(check_babel_invariants(seqfd({{5, 7}, {0, 0}, {5, 7}})).empty());

  // Subnet rows are outside this rule.
  Trace sub;
  sub.snapshots.push_back({{row(Row::DestKind::Subnet, 3, 1, 1, true, 0, 9, 100)}});
  sub.snapshots.push_back({{row(Row::DestKind::Subnet, 3, 1, 1, true, 0, 99, 50)}});
  CHECK(check_babel_invariants(sub).empty());
}
