#include "dvsim/topology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dvsim {

namespace {
template <typename V>
std::uint32_t find_name(const V& names, const std::string& name, const char* what) {
  for (std::uint32_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw std::invalid_argument(std::string("unknown ") + what + ": " + name);
}
template <typename V>
void check_fresh(const V& names, const std::string& name, const char* what) {
  if (name.empty()) throw std::invalid_argument(std::string("empty ") + what + " name");
  for (const auto& n : names)
    if (n == name) throw std::invalid_argument(std::string("duplicate ") + what + ": " + name);
}
} // namespace

RouterIx Topology::add_router(const std::string& name) {
  check_fresh(router_names, name, "router");
  router_names.push_back(name);
  router_interfaces.emplace_back();
  router_alive.push_back(true);
  return static_cast<RouterIx>(router_names.size() - 1);
}

SubnetIx Topology::add_subnet(const std::string& name) {
  check_fresh(subnet_names, name, "subnet");
  subnet_names.push_back(name);
  subnet_interfaces.emplace_back();
  link_up.push_back(true);
  return static_cast<SubnetIx>(subnet_names.size() - 1);
}

InterfaceIx Topology::add_interface(const std::string& name, RouterIx router, SubnetIx subnet) {
  check_fresh(interface_names, name, "interface");
  if (router >= router_names.size()) throw std::invalid_argument("interface owner out of range");
  if (subnet >= subnet_names.size()) throw std::invalid_argument("interface subnet out of range");
  interface_names.push_back(name);
  interface_owner.push_back(router);
  interface_subnet.push_back(subnet);
  auto ix = static_cast<InterfaceIx>(interface_names.size() - 1);
  router_interfaces[router].push_back(ix);
  subnet_interfaces[subnet].push_back(ix);
  return ix;
}

RouterIx Topology::router(const std::string& name) const {
  return find_name(router_names, name, "router");
}
SubnetIx Topology::subnet(const std::string& name) const {
  return find_name(subnet_names, name, "subnet");
}
InterfaceIx Topology::interface(const std::string& name) const {
  return find_name(interface_names, name, "interface");
}

bool Topology::subnet_effectively_up(SubnetIx s) const {
  if (!link_up[s]) return false;
  for (InterfaceIx i : subnet_interfaces[s])
    if (!router_alive[interface_owner[i]]) return false;
  return true;
}

std::vector<std::pair<RouterIx, SubnetIx>> Topology::neighbors(RouterIx r) const {
  std::set<std::pair<RouterIx, SubnetIx>> out;
  if (!router_alive[r]) return {};
  for (InterfaceIx i : router_interfaces[r]) {
    SubnetIx s = interface_subnet[i];
    if (!subnet_effectively_up(s)) continue;
    for (InterfaceIx j : subnet_interfaces[s]) {
      RouterIx other = interface_owner[j];
      if (other != r) out.insert({other, s});
    }
  }
  return {out.begin(), out.end()};
}

std::vector<RouterIx> Topology::routers_on(SubnetIx s) const {
  std::set<RouterIx> out;
  for (InterfaceIx i : subnet_interfaces[s]) out.insert(interface_owner[i]);
  return {out.begin(), out.end()};
}

bool Topology::attached(RouterIx r, SubnetIx s) const {
  for (InterfaceIx i : router_interfaces[r])
    if (interface_subnet[i] == s) return true;
  return false;
}

void Topology::validate() const {
  if (interface_owner.size() != interface_names.size() ||
      interface_subnet.size() != interface_names.size())
    throw std::invalid_argument("interface table size mismatch");
  for (std::size_t r = 0; r < router_names.size(); ++r) {
    std::set<SubnetIx> seen;
    for (InterfaceIx i : router_interfaces[r]) {
      if (interface_owner[i] != r) throw std::invalid_argument("interface owner table corrupt");
      if (!seen.insert(interface_subnet[i]).second)
        throw std::invalid_argument("router " + router_names[r] +
                                    " attached twice to subnet " +
                                    subnet_names[interface_subnet[i]]);
    }
  }
  for (std::size_t s = 0; s < subnet_names.size(); ++s)
    for (InterfaceIx i : subnet_interfaces[s])
      if (interface_subnet[i] != s) throw std::invalid_argument("subnet table corrupt");
}

LoopKind classify_loop(const Topology& topo, RouterIx origin, SubnetIx dest, const Path& path) {
  if (path.empty()) throw std::invalid_argument("empty path");
  // Structural checks: interfaces exist, each out interface sits on its hop's
  // subnet, entry interfaces sit on the same subnet, and consecutive hops
  // chain through the same router.
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Hop& h = path[k];
    if (h.out >= topo.num_interfaces() || h.subnet >= topo.num_subnets())
      throw std::invalid_argument("hop index out of range");
    if (topo.interface_subnet[h.out] != h.subnet)
      throw std::invalid_argument("out interface not on hop subnet");
    bool last = (k + 1 == path.size());
    if (!h.in) {
      // A wildcard entry is only meaningful on the terminal hop (delivery
      // onto the destination subnet itself).
      if (!last) throw std::invalid_argument("missing entry interface mid-path");
      continue;
    }
    if (*h.in >= topo.num_interfaces()) throw std::invalid_argument("hop index out of range");
    if (topo.interface_subnet[*h.in] != h.subnet)
      throw std::invalid_argument("in interface not on hop subnet");
    if (!last && topo.interface_owner[*h.in] != topo.interface_owner[path[k + 1].out])
      throw std::invalid_argument("path does not chain through a single router");
  }

  // A loop candidate must depart from the origin and return to it.
  if (topo.interface_owner[path.front().out] != origin) return LoopKind::NotALoop;
  const Hop& lastHop = path.back();
  if (!lastHop.in || topo.interface_owner[*lastHop.in] != origin) return LoopKind::NotALoop;
  bool touches_dest = false;
  for (const Hop& h : path)
    if (h.subnet == dest) { touches_dest = true; break; }
  if (!touches_dest) return LoopKind::NotALoop;

  // Mid-path visits to the origin (entry interfaces owned by it, excluding
  // the final return) decide the class.  None: simple loop.  Otherwise the
  // departure interface right after the LAST such visit is compared with the
  // final return interface: same interface = Y-combination (the path comes
  // back along the arm it re-left on), different = X-combination.
  std::optional<InterfaceIx> redeparture;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const Hop& h = path[k];
    if (h.in && topo.interface_owner[*h.in] == origin)
      redeparture = path[k + 1].out;
  }
  if (!redeparture) return LoopKind::SimpleLoop;
  return *redeparture == *lastHop.in ? LoopKind::YCombination : LoopKind::XCombination;
}

} // namespace dvsim
