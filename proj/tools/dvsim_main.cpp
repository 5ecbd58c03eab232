#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dvsim/corpus.hpp"
#include "dvsim/report.hpp"

namespace {

using namespace dvsim;

void apply_mitigation(const std::string& protocol, const std::string& mit, Params& params) {
  if (mit.empty()) return;
  if (protocol == "rip" || protocol == "rip-tree") {
    params.set("split_horizon", "0");
    params.set("poisoned_reverse", "0");
    params.set("hold_down", "0");
    if (mit == "none") return;
    if (mit == "split-horizon") {
      params.set("split_horizon", "1");
      return;
    }
    if (mit == "poisoned-reverse") {
      params.set("poisoned_reverse", "1");
      return;
    }
    if (mit == "hold-down") {
      params.set("hold_down", "60");
      return;
    }
    if (mit == "all") {
      params.set("split_horizon", "1");
      params.set("poisoned_reverse", "1");
      params.set("hold_down", "60");
      return;
    }
    throw CLI::ValidationError("--mitigation",
                               "expected none|split-horizon|poisoned-reverse|hold-down|all");
  }
  if (protocol == "rip-mti") {
    if (mit != "off" && mit != "normal" && mit != "strict" && mit != "careful")
      throw CLI::ValidationError("--mitigation", "expected off|normal|strict|careful");
    params.set("mode", mit);
    return;
  }
  throw CLI::ValidationError("--mitigation", "only meaningful for rip, rip-tree, rip-mti");
}

int run_simulate(const std::string& scenario_path, const std::string& protocol,
                 const std::string& mode_s, const std::string& mitigation,
                 std::uint64_t seed, Tick horizon, const std::string& out_csv,
                 const std::string& out_report, bool check_loops) {
  Scenario sc = load_scenario(scenario_path);
  apply_mitigation(protocol, mitigation, sc.params);
  Mode mode = mode_s == "sync" ? Mode::Sync : Mode::Async;
  if (horizon <= 0) horizon = sc.params.get_int("horizon", 300);

  RunResult rr = run_scenario(sc, protocol, mode, horizon, seed);
  RunReport rep = analyze_run(rr.final_topo, sc, protocol, rr.trace);

  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    if (!f) {
      std::cerr << "cannot write " << out_csv << "\n";
      return 1;
    }
    f << rr.trace.to_csv(rr.final_topo);
  }
  if (!out_report.empty()) {
    std::ofstream f(out_report);
    if (!f) {
      std::cerr << "cannot write " << out_report << "\n";
      return 1;
    }
    write_report_json(f, rr.final_topo, sc, protocol, rr.trace);
  }

  std::cout << protocol << " on " << scenario_path << ": " << horizon << " ticks, "
            << rr.trace.messages_sent << " messages, stable from tick " << rep.stable_from
            << ", " << rep.episodes.size() << " loop episode(s), "
            << rep.oracle_mismatches.size() << " oracle mismatch(es), "
            << rep.violations.size() << " invariant violation(s)\n";
  if (check_loops) {
    for (const Episode& e : rep.episodes) {
      std::cout << "  loop: dest="
                << (e.kind == Row::DestKind::Subnet ? rr.final_topo.subnet_names[e.dest]
                                                    : rr.final_topo.router_names[e.dest])
                << " ticks " << e.start << ".." << e.end << " routers";
      for (RouterIx r : e.participants) std::cout << ' ' << rr.final_topo.router_names[r];
      std::cout << "\n";
    }
    if (!rep.episodes.empty()) return 2;
  }
  return 0;
}

int run_corpus(const std::string& protocol, const std::string& mode_s,
               const std::string& mitigation, int seeds, Tick horizon) {
  Mode mode = mode_s == "sync" ? Mode::Sync : Mode::Async;
  std::uint64_t episodes = 0, violations = 0, mismatches = 0, unstable = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    Scenario sc = make_corpus_scenario(protocol, static_cast<std::uint64_t>(seed));
    apply_mitigation(protocol, mitigation, sc.params);
    RunResult rr = run_scenario(sc, protocol, mode, horizon, static_cast<std::uint64_t>(seed));
    RunReport rep = analyze_run(rr.final_topo, sc, protocol, rr.trace);
    episodes += rep.episodes.size();
    violations += rep.violations.size();
    mismatches += rep.oracle_mismatches.size();
    if (rep.stable_from < 0 || rep.stable_from >= horizon - 1) ++unstable;
  }
  std::cout << protocol << " corpus, " << seeds << " seeds, horizon " << horizon << ": "
            << episodes << " loop episode(s), " << violations << " invariant violation(s), "
            << mismatches << " final-table oracle mismatch(es), " << unstable
            << " run(s) not settled\n";
  return episodes || violations || mismatches ? 2 : 0;
}

int run_oracle(const std::string& scenario_path) {
  Scenario sc = load_scenario(scenario_path);
  ShortestPaths sp = shortest_paths(sc.topo);
  const Topology& topo = sc.topo;
  std::cout << "subnet distances (table units; attached = 0):\n";
  for (RouterIx r = 0; r < topo.num_routers(); ++r) {
    std::cout << "  " << topo.router_names[r] << ":";
    for (SubnetIx s = 0; s < topo.num_subnets(); ++s) {
      std::cout << ' ' << topo.subnet_names[s] << '=';
      if (sp.subnet_dist[r][s] == kMetricInf)
        std::cout << "inf";
      else
        std::cout << sp.subnet_dist[r][s];
    }
    std::cout << "\n";
  }
  std::cout << "diameter bound: " << rip_diameter(sp) << " rounds\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic distance-vector routing simulator"};
  app.require_subcommand(1);

  std::string scenario_path, protocol, mode_s = "async", mitigation, out_csv, out_report;
  std::uint64_t seed = 1;
  Tick horizon = 0;
  bool check_loops = false;
  int seeds = 50;

  auto proto_check = CLI::IsMember({"rip", "rip-mti", "aodv", "eigrp", "babel", "rip-tree"});

  CLI::App* sim = app.add_subcommand("simulate", "run one scenario");
  sim->add_option("--scenario", scenario_path, "scenario file")->required();
  sim->add_option("--protocol", protocol, "protocol")->required()->check(proto_check);
  sim->add_option("--mode", mode_s, "async|sync")->check(CLI::IsMember({"async", "sync"}));
  sim->add_option("--mitigation", mitigation, "rip: none|split-horizon|poisoned-reverse|hold-down|all; rip-mti: off|normal|strict|careful");
  sim->add_option("--seed", seed, "engine seed");
  sim->add_option("--horizon", horizon, "ticks to simulate (default: scenario param or 300)");
  sim->add_option("--out", out_csv, "write trace CSV here");
  sim->add_option("--report", out_report, "write JSON report here");
  sim->add_flag("--check-loops", check_loops, "print loop episodes; exit 2 if any");

  CLI::App* cor = app.add_subcommand("corpus", "run the randomized corpus");
  cor->add_option("--protocol", protocol, "protocol")->required()->check(proto_check);
  cor->add_option("--mode", mode_s, "async|sync")->check(CLI::IsMember({"async", "sync"}));
  cor->add_option("--mitigation", mitigation, "see simulate");
  cor->add_option("--seeds", seeds, "number of seeds (default 50)");
  cor->add_option("--horizon", horizon, "ticks per run (default 300)");

  CLI::App* ora = app.add_subcommand("oracle", "print shortest-path tables for a scenario");
  ora->add_option("--scenario", scenario_path, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return run_simulate(scenario_path, protocol, mode_s, mitigation, seed, horizon,
                          out_csv, out_report, check_loops);
    if (cor->parsed()) return run_corpus(protocol, mode_s, mitigation, seeds,
                                         horizon <= 0 ? 300 : horizon);
    if (ora->parsed()) return run_oracle(scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
