#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dvsim/types.hpp"

namespace dvsim {

// A topology is a bipartite graph of routers and subnets joined by named
// interfaces.  Every interface belongs to exactly one router and is plugged
// into exactly one subnet; a point-to-point link is simply a subnet with two
// interfaces.  Mutable state (link up/down, router alive) lives here too so
// the engine can flip it mid-run.
class Topology {
public:
  std::vector<std::string> router_names;
  std::vector<std::string> subnet_names;
  std::vector<std::string> interface_names;

  std::vector<RouterIx> interface_owner;  // interface -> router
  std::vector<SubnetIx> interface_subnet; // interface -> subnet
  std::vector<std::vector<InterfaceIx>> router_interfaces; // sorted
  std::vector<std::vector<InterfaceIx>> subnet_interfaces; // sorted

  std::vector<bool> link_up;     // per subnet
  std::vector<bool> router_alive;

  RouterIx add_router(const std::string& name);
  SubnetIx add_subnet(const std::string& name);
  // Attaches a fresh interface of `router` to `subnet`.  The interface name
  // must be globally unique.
  InterfaceIx add_interface(const std::string& name, RouterIx router, SubnetIx subnet);

  RouterIx router(const std::string& name) const;       // throws if unknown
  SubnetIx subnet(const std::string& name) const;       // throws if unknown
  InterfaceIx interface(const std::string& name) const; // throws if unknown

  std::size_t num_routers() const { return router_names.size(); }
  std::size_t num_subnets() const { return subnet_names.size(); }
  std::size_t num_interfaces() const { return interface_names.size(); }

  // A subnet carries traffic only while its link is up and every attached
  // router is alive (a dead router takes its interfaces down with it).
  bool subnet_effectively_up(SubnetIx s) const;

  // Live adjacent (router, shared subnet) pairs of r, excluding r itself,
  // sorted by (router, subnet).  One entry per shared subnet.
  std::vector<std::pair<RouterIx, SubnetIx>> neighbors(RouterIx r) const;

  // All routers attached to s, sorted, deduplicated.
  std::vector<RouterIx> routers_on(SubnetIx s) const;

  // True if some interface of r is plugged into s.
  bool attached(RouterIx r, SubnetIx s) const;

  // Throws std::invalid_argument on structural problems (empty names,
  // dangling indices, duplicate attachment of one router to one subnet via
  // two interfaces is allowed but flagged by validate as an error since no
  // protocol here needs it).
  void validate() const;
};

// One step of a forwarding path: the packet leaves through `out` (an
// interface of the router taking the step), crosses `subnet`, and — unless
// the subnet is the final destination — enters the next router through `in`.
struct Hop {
  InterfaceIx out;
  SubnetIx subnet;
  std::optional<InterfaceIx> in; // empty only for the terminal hop onto the destination subnet
};

using Path = std::vector<Hop>;

enum class LoopKind {
  NotALoop,
  SimpleLoop,   // the path never passes through the origin router in between
  XCombination, // re-enters the origin mid-path, departs through a different interface than it finally returns on
  YCombination, // re-enters mid-path and the final return uses the same interface as the re-departure
};

// Classifies a candidate routing loop for router `origin` toward subnet
// `dest`.  The path must chain correctly (each hop's entry interface sits on
// the previous hop's subnet, and consecutive hops share a router); malformed
// paths throw std::invalid_argument.  Returns NotALoop when the path does not
// start and end at `origin` or never touches `dest`.
LoopKind classify_loop(const Topology& topo, RouterIx origin, SubnetIx dest, const Path& path);

} // namespace dvsim
