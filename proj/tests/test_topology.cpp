#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "dvsim/topology.hpp"

using namespace dvsim;

namespace {

// Triangle A-B-C plus a stub subnet n hanging off C: the smallest topology
// with a routing loop and an interface pair to classify it by.
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

Hop hop(const Topology& t, const char* out, const char* subnet, const char* in) {
  Hop h;
  h.out = t.interface(out);
  h.subnet = t.subnet(subnet);
  if (in) h.in = t.interface(in);
  return h;
}

} // namespace

TEST_CASE("construction and lookups") {
  Topology t = triangle();
  CHECK(t.num_routers() == 3);
  CHECK(t.num_subnets() == 4);
  CHECK(t.num_interfaces() == 7);
  CHECK(t.router("C") == 2);
  CHECK(t.subnet("n") == 3);
  CHECK(t.interface_owner[t.interface("C.n")] == t.router("C"));
  CHECK(t.interface_subnet[t.interface("C.n")] == t.subnet("n"));
  CHECK_THROWS_AS((void)t.router("Z"), std::invalid_argument);
  CHECK_THROWS_AS((void)t.subnet("zz"), std::invalid_argument);
  CHECK_THROWS_AS((void)t.interface("none"), std::invalid_argument);
}

TEST_CASE("duplicate names are rejected") {
  Topology t;
  t.add_router("A");
  CHECK_THROWS_AS(t.add_router("A"), std::invalid_argument);
  t.add_subnet("s");
  CHECK_THROWS_AS(t.add_subnet("s"), std::invalid_argument);
  t.add_interface("i", 0, 0);
  CHECK_THROWS_AS(t.add_interface("i", 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(t.add_interface("j", 7, 0), std::invalid_argument);
  CHECK_THROWS_AS(t.add_interface("j", 0, 7), std::invalid_argument);
}

TEST_CASE("validate flags double attachment to one subnet") {
  Topology t;
  t.add_router("A");
  t.add_subnet("s");
  t.add_interface("i1", 0, 0);
  t.add_interface("i2", 0, 0);
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("subnet liveness tracks links and routers") {
  Topology t = triangle();
  SubnetIx ab = t.subnet("s_ab");
  CHECK(t.subnet_effectively_up(ab));
  t.link_up[ab] = false;
  CHECK_FALSE(t.subnet_effectively_up(ab));
  t.link_up[ab] = true;
  t.router_alive[t.router("B")] = false;
  CHECK_FALSE(t.subnet_effectively_up(ab));           // B's death takes s_ab down
  CHECK_FALSE(t.subnet_effectively_up(t.subnet("s_bc")));
  CHECK(t.subnet_effectively_up(t.subnet("s_ac")));   // A-C unaffected
  CHECK(t.subnet_effectively_up(t.subnet("n")));
}

TEST_CASE("neighbors are sorted, live, and exclude self") {
  Topology t = triangle();
  RouterIx a = t.router("A");
  auto n = t.neighbors(a);
  REQUIRE(n.size() == 2);
  CHECK(n[0] == std::make_pair(t.router("B"), t.subnet("s_ab")));
  CHECK(n[1] == std::make_pair(t.router("C"), t.subnet("s_ac")));

  t.link_up[t.subnet("s_ab")] = false;
  n = t.neighbors(a);
  REQUIRE(n.size() == 1);
  CHECK(n[0].first == t.router("C"));

  t.router_alive[a] = false;
  CHECK(t.neighbors(a).empty());
}

TEST_CASE("routers_on and attached") {
  Topology t = triangle();
  auto on = t.routers_on(t.subnet("s_bc"));
  REQUIRE(on.size() == 2);
  CHECK(on[0] == t.router("B"));
  CHECK(on[1] == t.router("C"));
  CHECK(t.attached(t.router("C"), t.subnet("n")));
  CHECK_FALSE(t.attached(t.router("A"), t.subnet("n")));
}

TEST_CASE("classify_loop: simple loop around the triangle") {
  Topology t = triangle();
  RouterIx a = t.router("A");
  Path p{hop(t, "A.ab", "s_ab", "B.ab"), hop(t, "B.bc", "s_bc", "C.bc"),
         hop(t, "C.ac", "s_ac", "A.ac")};
  CHECK(classify_loop(t, a, t.subnet("s_bc"), p) == LoopKind::SimpleLoop);
  // The same walk never crosses the stub subnet, so toward n it is no loop.
  CHECK(classify_loop(t, a, t.subnet("n"), p) == LoopKind::NotALoop);
  // Nor is it one for an origin it does not start at.
  CHECK(classify_loop(t, t.router("B"), t.subnet("s_bc"), p) == LoopKind::NotALoop);
}

TEST_CASE("classify_loop: X-combination departs through the other arm") {
  Topology t = triangle();
  RouterIx a = t.router("A");
  // Around the triangle, through A, and around again: the mid-path visit
  // re-departs on s_ab but the final return enters on s_ac.
  Path p{hop(t, "A.ab", "s_ab", "B.ab"), hop(t, "B.bc", "s_bc", "C.bc"),
         hop(t, "C.ac", "s_ac", "A.ac"), hop(t, "A.ab", "s_ab", "B.ab"),
         hop(t, "B.bc", "s_bc", "C.bc"), hop(t, "C.ac", "s_ac", "A.ac")};
  CHECK(classify_loop(t, a, t.subnet("s_bc"), p) == LoopKind::XCombination);
}

TEST_CASE("classify_loop: Y-combination bounces on the re-departure arm") {
  Topology t = triangle();
  RouterIx a = t.router("A");
  // After the mid-path visit the walk leaves through A.ac and the final
  // return comes back through that same interface.
  Path p{hop(t, "A.ab", "s_ab", "B.ab"), hop(t, "B.bc", "s_bc", "C.bc"),
         hop(t, "C.ac", "s_ac", "A.ac"), hop(t, "A.ac", "s_ac", "C.ac"),
         hop(t, "C.ac", "s_ac", "A.ac")};
  CHECK(classify_loop(t, a, t.subnet("s_bc"), p) == LoopKind::YCombination);
}

TEST_CASE("classify_loop: terminal wildcard hop reaches the destination subnet") {
  Topology t = triangle();
  RouterIx a = t.router("A");
  Path p{hop(t, "A.ab", "s_ab", "B.ab"), hop(t, "B.bc", "s_bc", "C.bc"),
         hop(t, "C.n", "n", nullptr)};
  // Ends on the stub, not back at the origin: a delivery, not a loop.
  CHECK(classify_loop(t, a, t.subnet("n"), p) == LoopKind::NotALoop);
}

TEST_CASE("classify_loop rejects malformed paths") {
  Topology t = triangle();
  RouterIx a = t.router("A");
  CHECK_THROWS_AS(classify_loop(t, a, t.subnet("n"), Path{}), std::invalid_argument);
  // Out interface not on the hop's subnet.
  Path wrong_subnet{hop(t, "A.ab", "s_ac", "C.ac")};
  CHECK_THROWS_AS(classify_loop(t, a, t.subnet("s_ac"), wrong_subnet), std::invalid_argument);
  // Wildcard entry before the end.
  Path early_wildcard{hop(t, "A.ab", "s_ab", nullptr), hop(t, "B.bc", "s_bc", "C.bc")};
  CHECK_THROWS_AS(classify_loop(t, a, t.subnet("s_bc"), early_wildcard), std::invalid_argument);
  // Consecutive hops that do not share a router.
  Path broken_chain{hop(t, "A.ab", "s_ab", "B.ab"), hop(t, "C.ac", "s_ac", "A.ac")};
  CHECK_THROWS_AS(classify_loop(t, a, t.subnet("s_ac"), broken_chain), std::invalid_argument);
}
