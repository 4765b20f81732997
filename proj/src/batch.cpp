#include "qcs/batch.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qcs/error.hpp"

namespace qcs {

namespace {

constexpr std::uint32_t kPickStream = 0x7069636bu;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

std::vector<SweepRun> run_sweep(const Scenario& scenario, const std::vector<NodeId>& sources) {
  const auto topo = scenario.topology();
  for (NodeId id : sources) {
    if (!topo.contains(id)) throw Error(ErrorCode::UnknownNode, fmt::format("unknown node id {}", id.value));
    if (topo.is_base(id)) throw Error(ErrorCode::Validation, "the base station cannot be a sweep source");
  }
  // Midway between the two levels: irregular, never devastating.
  const double reading = (scenario.thresholds.irregular_level + scenario.thresholds.devastating_level) / 2.0;

  std::vector<SweepRun> runs;
  runs.reserve(sources.size());
  for (NodeId id : sources) {
    Scenario fresh = scenario;
    fresh.events.clear();
    fresh.events.push_back(SenseEvent{0, id, reading});
    Simulation sim(std::move(fresh));
    sim.run_until_quiet();
    spdlog::debug("sweep source {}: quiet after {} ticks", id.value, sim.now());
    runs.push_back(SweepRun{fmt::format("N{}", id.value), id, sim.trace(), sim.now()});
  }
  return runs;
}

std::vector<NodeId> pick_random_sources(const Topology& topology, std::uint64_t seed, std::size_t k) {
  std::vector<NodeId> pool;
  for (NodeId id : topology.ids()) {
    if (!topology.is_base(id)) pool.push_back(id);
  }
  if (k > pool.size()) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("asked for {} sources, only {} non-base nodes", k, pool.size()));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), kPickStream};
  std::mt19937_64 gen(seq);
  std::shuffle(pool.begin(), pool.end(), gen);
  pool.resize(k);
  return pool;
}

std::vector<EnergyDiffRow> sweep_energy_rows(const std::vector<SweepRun>& runs, const Topology& topology) {
  std::vector<EnergyDiffRow> rows;
  for (const auto& r : runs) {
    auto part = energy_diff_rows(r.label, r.trace, topology);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::vector<PathRow> sweep_path_rows(const std::vector<SweepRun>& runs) {
  std::vector<PathRow> rows;
  for (const auto& r : runs) {
    auto part = path_rows(r.label, r.trace);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

void write_sweep_outputs(const std::filesystem::path& dir, const std::vector<SweepRun>& runs,
                         const Topology& topology) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  {
    auto out = open_out(dir / "energy_diff.csv");
    write_energy_diff_csv(out, sweep_energy_rows(runs, topology));
  }
  {
    auto out = open_out(dir / "path_comparisons.csv");
    write_path_csv(out, sweep_path_rows(runs));
  }
  {
    auto out = open_out(dir / "trace.txt");
    for (const auto& r : runs) {
      out << fmt::format("run {} source={} ticks={}\n", r.label, r.source.value, r.ticks);
      write_trace(out, r.trace);
    }
  }
  for (const auto& r : runs) {
    auto out = open_out(dir / fmt::format("ledger_{}.csv", r.label));
    r.trace.ledger.write_csv(out);
  }
  auto out = open_out(dir / "summary.txt");
  out << fmt::format("sweep: {} run(s)\n", runs.size());
  for (const auto& r : runs) {
    for (const auto& inc : r.trace.incidents) {
      if (inc.origin != r.source) continue;
      out << fmt::format("  {}: {} path {} nodes, comparisons {}, {}\n", r.label,
                         inc.delivered ? "delivered" : "undelivered", inc.path.size(),
                         count_comparisons(inc.replies_per_hop()), r.trace.base.msg.empty() ? "-" : r.trace.base.msg);
      break;
    }
  }
  out << "  " << kComparisonConvention << "\n";
}

}  // namespace qcs
