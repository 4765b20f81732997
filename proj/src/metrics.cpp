#include "qcs/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "qcs/error.hpp"

namespace qcs {

namespace {

std::string energy_text(Units e) { return is_infinite(e) ? std::string("Inf") : std::to_string(e); }

std::string flags_text(Flags f) { return fmt::format("{}{}", f.flag1 ? 1 : 0, f.flag2 ? 1 : 0); }

std::string ids_text(const std::vector<NodeId>& ids, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(ids[i].value);
  }
  return out;
}

std::string coord_text(double v) { return fmt::format("{:g}", v); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

std::vector<EnergyDiffRow> energy_diff_rows(const std::string& run, const Trace& trace, const Topology& topology) {
  std::vector<EnergyDiffRow> rows;
  for (NodeId id : topology.ids()) {
    if (topology.is_base(id)) continue;
    rows.push_back(EnergyDiffRow{run, id, trace.ledger.consumed(id)});
  }
  return rows;
}

std::vector<PathRow> path_rows(const std::string& run, const Trace& trace) {
  std::vector<PathRow> rows;
  for (const auto& inc : trace.incidents) {
    rows.push_back(PathRow{run, inc.id, inc.origin, inc.kind, inc.path.size(),
                           count_comparisons(inc.replies_per_hop()), inc.delivered, inc.path});
  }
  return rows;
}

void write_energy_diff_csv(std::ostream& out, const std::vector<EnergyDiffRow>& rows) {
  out << "run,node_id,consumed\n";
  for (const auto& r : rows) out << fmt::format("{},{},{}\n", r.run, r.node.value, r.consumed);
}

void write_path_csv(std::ostream& out, const std::vector<PathRow>& rows) {
  out << "run,incident,source,kind,path_nodes,comparisons,delivered,path\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.run, r.incident, r.source.value, incident_kind_name(r.kind),
                       r.path_nodes, r.comparisons, r.delivered ? 1 : 0, ids_text(r.path, " "));
  }
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "# tick records: packet lines in send order, then one node line per node\n";
  std::size_t p = 0;
  std::size_t n = 0;
  while (p < trace.packets.size() || n < trace.node_ticks.size()) {
    const Tick t = std::min(p < trace.packets.size() ? trace.packets[p].tick : ~Tick{0},
                            n < trace.node_ticks.size() ? trace.node_ticks[n].tick : ~Tick{0});
    for (; p < trace.packets.size() && trace.packets[p].tick == t; ++p) {
      const auto& r = trace.packets[p];
      const auto bytes = encode(r.packet);
      out << fmt::format("packet {} {} {} src={} dest={} flags={} hop={} rx=[{}] drop=[{}] hex={}\n", r.tick, r.seq,
                         kind_name(r.packet.header.kind), r.packet.header.src.value,
                         r.dest ? std::to_string(r.dest->value) : std::string("*"), flags_text(r.packet.header.flags),
                         r.packet.header.hop_count, ids_text(r.received, ","), ids_text(r.dropped, ","),
                         to_hex(bytes));
    }
    for (; n < trace.node_ticks.size() && trace.node_ticks[n].tick == t; ++n) {
      const auto& r = trace.node_ticks[n];
      out << fmt::format("node {} {} mode={} flags={} dispatch={} sent={} recv={} debit={} energy={} alive={}\n",
                         r.tick, r.node.value, mode_char(r.mode), flags_text(r.flags), dispatch_name(r.dispatch),
                         r.sent, r.received, r.debit, energy_text(r.energy), r.alive ? 1 : 0);
    }
  }
  for (const auto& inc : trace.incidents) {
    out << fmt::format("incident {} kind={} origin={} start={} delivered={} delivery_tick={} abandoned={} path=[{}]\n",
                       inc.id, incident_kind_name(inc.kind), inc.origin.value, inc.start_tick, inc.delivered ? 1 : 0,
                       inc.delivery_tick ? std::to_string(*inc.delivery_tick) : std::string("-"),
                       inc.abandoned ? 1 : 0, ids_text(inc.path, ","));
    for (const auto& h : inc.hops) {
      std::string replies;
      for (const auto& r : h.replies) {
        if (!replies.empty()) replies += ' ';
        replies += fmt::format("{}:{}:{}", r.node.value, energy_text(r.energy), r.dist2);
      }
      out << fmt::format("hop {} incident={} node={} self_dist2={} chosen={} completed={} replies=[{}]\n", h.tick,
                         inc.id, h.node.value, h.self_dist2, h.chosen ? std::to_string(h.chosen->value) : "-",
                         h.completed ? 1 : 0, replies);
    }
  }
  for (const auto& w : trace.reset_wave) out << fmt::format("wave {} node={} hop={}\n", w.tick, w.node.value, w.hop);
  for (const auto& m : trace.base_inbox) {
    out << fmt::format("inbox {} from={} incident={} msg=\"{}\"\n", m.tick, m.from.value, m.incident, m.message);
  }
  for (const auto& [t, msg] : trace.base_log) out << fmt::format("base {} {}\n", t, msg);
}

void write_summary(std::ostream& out, const Simulation& sim) {
  const auto& trace = sim.trace();
  const auto& base = trace.base;
  const auto& topo = sim.topology();
  out << fmt::format("ticks run: {}\n", sim.now());
  out << fmt::format("nodes: {} (base {}), hop cap {}\n\n", topo.size(), base.id.value, sim.hop_cap());
  out << "base station\n";
  out << fmt::format("  id: {}\n", base.id.value);
  out << fmt::format("  energy: {}\n", energy_text(base.energy));
  out << fmt::format("  loc: [{} {}]\n", coord_text(base.loc.x), coord_text(base.loc.y));
  out << fmt::format("  flag1: {}\n", base.flags.flag1 ? 1 : 0);
  out << fmt::format("  flag2: {}\n", base.flags.flag2 ? 1 : 0);
  out << fmt::format("  mode: {}\n", mode_char(base.mode));
  out << fmt::format("  msg: {}\n", base.msg);
  out << fmt::format("  status: {}\n", base.status);
  for (NodeId d : base.disconnected) out << fmt::format("  node number '{}' became disconnected\n", d.value);

  out << fmt::format("\nbase inbox: {} message(s)\n", trace.base_inbox.size());
  for (const auto& m : trace.base_inbox) {
    out << fmt::format("  tick {} via node {}: {}\n", m.tick, m.from.value, m.message);
  }

  out << fmt::format("\nincidents: {}\n", trace.incidents.size());
  for (const auto& inc : trace.incidents) {
    const char* state = inc.delivered ? "delivered" : inc.abandoned ? "abandoned" : "open";
    out << fmt::format("  #{} {} from node {}: {}, path {} ({} nodes), comparisons {}\n", inc.id,
                       incident_kind_name(inc.kind), inc.origin.value, state, ids_text(inc.path, " -> "),
                       inc.path.size(), count_comparisons(inc.replies_per_hop()));
  }
  out << "  " << kComparisonConvention << "\n";

  Units total = 0;
  std::size_t alive = 0;
  for (const auto& n : sim.nodes()) {
    if (n.base) continue;
    total += trace.ledger.consumed(n.id);
    if (n.alive) ++alive;
  }
  out << fmt::format("\nenergy consumed (units): {}\n", total);
  out << fmt::format("alive nodes: {} of {}\n", alive, topo.size() - 1);
  out << fmt::format("ledger audit: {}\n", trace.ledger.audit() ? "ok" : "FAILED");
}

void write_outputs(const std::filesystem::path& dir, const std::string& run, const Simulation& sim) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  const auto& trace = sim.trace();
  {
    auto out = open_out(dir / "trace.txt");
    write_trace(out, trace);
  }
  {
    auto out = open_out(dir / "ledger.csv");
    trace.ledger.write_csv(out);
  }
  {
    auto out = open_out(dir / "energy_diff.csv");
    write_energy_diff_csv(out, energy_diff_rows(run, trace, sim.topology()));
  }
  {
    auto out = open_out(dir / "path_comparisons.csv");
    write_path_csv(out, path_rows(run, trace));
  }
  {
    auto out = open_out(dir / "summary.txt");
    write_summary(out, sim);
  }
}

}  // namespace qcs
