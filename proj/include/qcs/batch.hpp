#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcs/engine.hpp"
#include "qcs/metrics.hpp"

namespace qcs {

struct SweepRun {
  std::string label;
  NodeId source{};
  Trace trace;
  /// Ticks executed before the network went quiet (or the horizon).
  Tick ticks{0};
};

/// One irregular incident per source, each on a fresh copy of the scenario
/// (same seed, scenario events dropped), run until the network is quiet.
/// Labels default to "N<id>".
std::vector<SweepRun> run_sweep(const Scenario& scenario, const std::vector<NodeId>& sources);

/// k distinct non-base nodes, a pure function of (topology, seed).
std::vector<NodeId> pick_random_sources(const Topology& topology, std::uint64_t seed, std::size_t k);

std::vector<EnergyDiffRow> sweep_energy_rows(const std::vector<SweepRun>& runs, const Topology& topology);
std::vector<PathRow> sweep_path_rows(const std::vector<SweepRun>& runs);

/// energy_diff.csv, path_comparisons.csv, trace.txt (all runs) and
/// summary.txt; one ledger_<label>.csv per run.
void write_sweep_outputs(const std::filesystem::path& dir, const std::vector<SweepRun>& runs,
                         const Topology& topology);

}  // namespace qcs
