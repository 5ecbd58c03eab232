#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dvsim/engine.hpp"
#include "dvsim/oracle.hpp"
#include "dvsim/scenario.hpp"

namespace dvsim {

// Post-run analysis bundle: when the tables went quiet, which next-hop cycle
// episodes occurred, how the final tables compare against the brute-force
// oracle for the protocol's metric, and any invariant violations the
// protocol's checker found.
struct RunReport {
  Tick stable_from = -1; // first tick from which snapshots stop changing (-1: never)
  std::vector<Episode> episodes;
  std::vector<std::string> oracle_mismatches; // final table vs oracle
  std::vector<Violation> violations;          // protocol invariant checker
};

// `final_topo` must be the engine's topology after the run (script events
// applied); the oracle comparison uses its link/router liveness.
RunReport analyze_run(const Topology& final_topo, const Scenario& sc,
                      const std::string& protocol, const Trace& trace);

// Writes the report as JSON: convergence, message counts by kind, drop
// counters, episodes, mismatches, violations, and the annotation log.
void write_report_json(std::ostream& os, const Topology& final_topo, const Scenario& sc,
                       const std::string& protocol, const Trace& trace);

} // namespace dvsim
