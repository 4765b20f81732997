#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcs/engine.hpp"

namespace qcs {

/// One row per (run, non-base node): energy drawn over the run.
struct EnergyDiffRow {
  std::string run;
  NodeId node{};
  Units consumed{0};
};

/// One row per incident.
struct PathRow {
  std::string run;
  IncidentId incident{0};
  NodeId source{};
  IncidentKind kind{IncidentKind::Irregular};
  std::size_t path_nodes{0};
  std::uint64_t comparisons{0};
  bool delivered{false};
  std::vector<NodeId> path;
};

inline constexpr std::string_view kComparisonConvention =
    "comparisons = sum over hops of 2 x repliers (one threshold check and one "
    "distance-to-base comparison against the incumbent per reply; dead-end hops included)";

std::vector<EnergyDiffRow> energy_diff_rows(const std::string& run, const Trace& trace, const Topology& topology);
std::vector<PathRow> path_rows(const std::string& run, const Trace& trace);

/// run,node_id,consumed
void write_energy_diff_csv(std::ostream& out, const std::vector<EnergyDiffRow>& rows);
/// run,incident,source,kind,path_nodes,comparisons,delivered,path
void write_path_csv(std::ostream& out, const std::vector<PathRow>& rows);

/// Line-oriented event log ordered by (tick, kind, node id, sequence).
void write_trace(std::ostream& out, const Trace& trace);
/// Base-station record, inbox, incident table and energy totals.
void write_summary(std::ostream& out, const Simulation& sim);

/// trace.txt, ledger.csv, energy_diff.csv, path_comparisons.csv, summary.txt.
void write_outputs(const std::filesystem::path& dir, const std::string& run, const Simulation& sim);

}  // namespace qcs
