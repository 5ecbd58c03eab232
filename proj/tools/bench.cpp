#include <chrono>
#include <iostream>
#include <random>

#include "dvsim/corpus.hpp"
#include "dvsim/oracle.hpp"

namespace {

using namespace dvsim;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Topology big_topo(std::uint32_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t k) { return static_cast<std::uint32_t>(rng() % k); };
  Topology topo;
  for (std::uint32_t i = 0; i < n; ++i) topo.add_router("R" + std::to_string(i));
  std::uint32_t snum = 0;
  auto link = [&](RouterIx a, RouterIx b) {
    std::string name = "s" + std::to_string(snum++);
    SubnetIx s = topo.add_subnet(name);
    topo.add_interface(topo.router_names[a] + "." + name, a, s);
    topo.add_interface(topo.router_names[b] + "." + name, b, s);
  };
  for (std::uint32_t i = 1; i < n; ++i) link(pick(i), i);
  for (std::uint32_t e = 0; e < 2 * n; ++e) {
    RouterIx a = pick(n), b = pick(n);
    if (a != b) link(a, b); // parallel subnets are fine for the kernels
  }
  topo.validate();
  return topo;
}

} // namespace

int main() {
  // Shortest-path sweep: one BFS per router.
  {
    Topology topo = big_topo(400, 7);
    auto t0 = Clock::now();
    ShortestPaths serial = shortest_paths(topo);
    double t_serial = ms_since(t0);
    t0 = Clock::now();
    ShortestPaths parallel = shortest_paths_parallel(topo);
    double t_parallel = ms_since(t0);
    bool equal = serial.router_dist == parallel.router_dist &&
                 serial.subnet_dist == parallel.subnet_dist;
    std::cout << "shortest_paths      400 routers: serial " << t_serial << " ms, openmp "
              << t_parallel << " ms, results " << (equal ? "equal" : "DIFFER") << "\n";
    if (!equal) return 1;
  }

  // Composite-metric fixpoint.
  {
    Topology topo = big_topo(150, 11);
    std::vector<DualVector> cost(topo.num_subnets());
    std::mt19937_64 rng(13);
    for (auto& v : cost) {
      v.bandwidth = 10;
      v.delay = 1 + rng() % 10;
      v.load = 0;
      v.reliability = 255;
    }
    KValues k;
    auto t0 = Clock::now();
    EigrpOracle serial = eigrp_fixpoint(topo, cost, k);
    double t_serial = ms_since(t0);
    t0 = Clock::now();
    EigrpOracle parallel = eigrp_fixpoint_parallel(topo, cost, k);
    double t_parallel = ms_since(t0);
    bool equal = serial.metric == parallel.metric;
    std::cout << "eigrp_fixpoint      150 routers: serial " << t_serial << " ms, openmp "
              << t_parallel << " ms, results " << (equal ? "equal" : "DIFFER") << "\n";
    if (!equal) return 1;
  }

  // Cycle scan over real traces (plain distance-vector, loops welcome).
  {
    std::vector<Trace> traces;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      Scenario sc = make_corpus_scenario("rip", seed);
      traces.push_back(run_scenario(sc, "rip", Mode::Async, 300, seed).trace);
    }
    auto t0 = Clock::now();
    std::size_t found_serial = 0;
    for (const Trace& tr : traces) found_serial += find_cycles(tr).size();
    double t_serial = ms_since(t0);
    t0 = Clock::now();
    std::size_t found_parallel = 0;
    for (const Trace& tr : traces) found_parallel += find_cycles_parallel(tr).size();
    double t_parallel = ms_since(t0);
    bool equal = found_serial == found_parallel;
    for (const Trace& tr : traces)
      if (!(find_cycles(tr) == find_cycles_parallel(tr))) equal = false;
    std::cout << "find_cycles  8 traces x 300 ticks: serial " << t_serial << " ms, openmp "
              << t_parallel << " ms, " << found_serial << " cycles, results "
              << (equal ? "equal" : "DIFFER") << "\n";
    if (!equal) return 1;
  }
  return 0;
}
