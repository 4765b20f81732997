#include "qcs/engine.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qcs/error.hpp"

namespace qcs {

namespace {

constexpr std::uint32_t kLossStream = 0x6c6f7373u;

}  // namespace

const char* dispatch_name(Dispatch d) {
  switch (d) {
    case Dispatch::Regular: return "regular";
    case Dispatch::Irregular: return "irregular";
    case Dispatch::PetrolFlow: return "petrol";
    case Dispatch::Idle: return "idle";
  }
  return "?";
}

const char* incident_kind_name(IncidentKind kind) {
  switch (kind) {
    case IncidentKind::Irregular: return "irregular";
    case IncidentKind::Devastating: return "devastating";
    case IncidentKind::Isolation: return "isolation";
  }
  return "?";
}

std::vector<std::size_t> IncidentRecord::replies_per_hop() const {
  std::vector<std::size_t> out;
  out.reserve(hops.size());
  for (const auto& h : hops) out.push_back(h.replies.size());
  return out;
}

std::uint64_t count_comparisons(const std::vector<std::size_t>& replies_per_hop) {
  std::uint64_t total = 0;
  for (auto k : replies_per_hop) total += 2 * static_cast<std::uint64_t>(k);
  return total;
}

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)), topology_(scenario_.topology()) {
  scenario_.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(scenario_.sim.seed),
                    static_cast<std::uint32_t>(scenario_.sim.seed >> 32), kLossStream};
  loss_rng_.seed(seq);

  initial_modes_ = init_modes(topology_, scenario_.sim.seed);
  for (NodeId id : topology_.ids()) {
    NodeState n;
    n.id = id;
    n.pos = topology_.position(id);
    n.base = topology_.is_base(id);
    n.energy = draw_initial_energy(scenario_.sim.seed, id, scenario_.costs, n.base);
    n.mode = n.base ? Mode::C : initial_modes_.at(id);
    n.pre_s_mode = n.mode;
    index_.emplace(id, nodes_.size());
    nodes_.push_back(n);
    trace_.ledger.open(id, n.energy);
  }
  for (const auto& ev : scenario_.events) events_.emplace(ev.tick, ev);

  auto& base = trace_.base;
  base.id = topology_.base();
  base.loc = topology_.position(base.id);
  base.status = "Network is fine";
}

NodeState& Simulation::mut(NodeId id) { return nodes_[index_.at(id)]; }

void Simulation::accept(Tick t, PacketRecord& rec, NodeId rx) {
  rec.received.push_back(rx);
  count_received(rx);
  mut(rx) = refresh_neighbor(node(rx), rec.packet.header.src, t);
}

const NodeState& Simulation::node(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, fmt::format("unknown node id {}", id.value));
  return nodes_[it->second];
}

Dispatch Simulation::classify(const NodeState& n) const {
  if (!n.alive || n.base) return Dispatch::Idle;
  if (n.flags.flag2) return Dispatch::PetrolFlow;
  if (n.flags.flag1) return Dispatch::Irregular;
  return Dispatch::Regular;
}

bool Simulation::lost() {
  const double p = scenario_.sim.loss_prob;
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(loss_rng_);
}

void Simulation::charge(Tick t, NodeId id, DebitCause cause, Units amount) {
  auto& n = mut(id);
  if (n.base) return;
  const Units drawn = trace_.ledger.debit(t, id, cause, amount);
  n.energy = trace_.ledger.balance(id);
  counters_[id].debit += drawn;
  if (n.energy == 0 && n.alive) {
    n.alive = false;
    spdlog::debug("tick {}: node {} exhausted", t, id.value);
    drop_carried(id);
  }
}

PacketRecord& Simulation::record(Tick t, const Packet& p, std::optional<NodeId> dest) {
  trace_.packets.push_back(PacketRecord{t, seq_++, p, dest, {}, {}});
  count_sent(p.header.src);
  return trace_.packets.back();
}

IncidentId Simulation::open_incident(IncidentKind kind, NodeId origin, std::string message, Tick t, NodeId carrier) {
  IncidentRecord inc;
  inc.id = static_cast<IncidentId>(trace_.incidents.size() + 1);
  inc.kind = kind;
  inc.origin = origin;
  inc.message = std::move(message);
  inc.start_tick = t;
  inc.path.push_back(carrier);
  trace_.incidents.push_back(std::move(inc));
  return trace_.incidents.back().id;
}

void Simulation::drop_carried(NodeId id) {
  if (auto it = carrying_.find(id); it != carrying_.end()) {
    for (IncidentId inc : it->second) {
      auto& rec = trace_.incidents[inc - 1];
      if (!rec.delivered) rec.abandoned = true;
    }
    carrying_.erase(it);
  }
}

void Simulation::deliver_to_base(Tick t, NodeId from, IncidentId incident, const Packet& p) {
  auto& base = trace_.base;
  base.flags = p.header.flags;
  base.mode = Mode::S;
  base.msg = p.body.message;
  trace_.base_inbox.push_back(BaseMessage{t, from, incident, p.body.message});
  auto& rec = trace_.incidents[incident - 1];
  if (!rec.delivered) {
    rec.delivered = true;
    rec.delivery_tick = t;
  }
  if (rec.kind == IncidentKind::Isolation) {
    base.disconnected.insert(rec.origin);
    base.status = fmt::format("node number '{}' became disconnected", rec.origin.value);
  } else {
    base.status = fmt::format("{} incident from node {}", incident_kind_name(rec.kind), rec.origin.value);
  }
  spdlog::info("tick {}: base received '{}' via node {}", t, p.body.message, from.value);
}

void Simulation::inject(const SenseEvent& event) {
  if (event.tick < now_) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("event tick {} already ran (now {})", event.tick, now_));
  }
  if (!topology_.contains(event.node)) {
    throw Error(ErrorCode::UnknownNode, fmt::format("unknown node id {}", event.node.value));
  }
  if (topology_.is_base(event.node)) {
    throw Error(ErrorCode::Validation, "the base station does not sense");
  }
  events_.emplace(event.tick, event);
}

Tick Simulation::neighbor_timeout() const {
  const Tick configured = scenario_.sim.neighbor_timeout;
  return configured != 0 ? configured : static_cast<Tick>(2 * topology_.size());
}

bool Simulation::quiet() const {
  if (wave_.active) return false;
  for (const auto& n : nodes_) {
    if (n.alive && !n.base && n.mode == Mode::S) return false;
  }
  for (const auto& [id, q] : carrying_) {
    if (!q.empty()) return false;
  }
  return events_.lower_bound(now_) == events_.end();
}

void Simulation::run() {
  while (!finished()) step();
}

void Simulation::run_until_quiet() {
  while (!finished()) {
    step();
    if (quiet()) break;
  }
}

void Simulation::step() {
  if (finished()) throw Error(ErrorCode::Contract, "simulation already reached its horizon");
  const Tick t = now_;
  counters_.clear();

  std::map<NodeId, Dispatch> dispatch;
  std::map<NodeId, std::pair<Mode, Flags>> at_start;
  for (const auto& n : nodes_) {
    dispatch[n.id] = classify(n);
    at_start[n.id] = {n.mode, n.flags};
  }

  regular_phase(t, dispatch);
  irregular_phase(t, dispatch);
  petrol_phase(t, dispatch);
  wave_phase(t);
  sense_phase(t);
  maintenance_phase(t);
  transition_phase(dispatch);

  for (const auto& n : nodes_) {
    const auto c = counters_[n.id];
    const auto& [mode, flags] = at_start[n.id];
    trace_.node_ticks.push_back(
        NodeTickRecord{t, n.id, mode, flags, dispatch[n.id], c.sent, c.received, c.debit, n.energy, n.alive});
  }
  ++now_;
}

void Simulation::regular_phase(Tick t, const std::map<NodeId, Dispatch>& dispatch) {
  bool base_heard = false;
  for (NodeId id : topology_.ids()) {
    if (dispatch.at(id) != Dispatch::Regular) continue;
    const auto& sender = node(id);
    if (!sender.alive || sender.mode != Mode::Q) continue;

    const Packet q = make_query(sender);
    charge(t, id, DebitCause::QuerySend, unit_cost(scenario_.costs, PacketKind::Query, Direction::Send));
    auto& rec = record(t, q, std::nullopt);
    for (NodeId nb : topology_.neighbors(id)) {
      if (!node(nb).alive) continue;
      if (lost()) {
        rec.dropped.push_back(nb);
        continue;
      }
      accept(t, rec, nb);
      if (topology_.is_base(nb)) {
        base_heard = true;
        mut(nb) = handle_query(node(nb), q, t).state;
        continue;
      }
      charge(t, nb, DebitCause::QueryRecv, unit_cost(scenario_.costs, PacketKind::Query, Direction::Receive));
      if (!node(nb).alive) continue;
      mut(nb) = handle_query(node(nb), q, t).state;
    }
  }
  if (base_heard) trace_.base_log.emplace_back(t, "Network is fine");
}

void Simulation::irregular_phase(Tick t, const std::map<NodeId, Dispatch>& dispatch) {
  for (NodeId id : topology_.ids()) {
    if (dispatch.at(id) != Dispatch::Irregular) continue;
    const auto& n = node(id);
    if (!n.alive || n.flags != kIrregular) continue;
    auto it = carrying_.find(id);
    if (it == carrying_.end() || it->second.empty()) {
      // Flagged without an incident to forward (its incidents were dropped).
      mut(id) = reset_node(n);
      continue;
    }
    irregular_hop(t, id);
  }
}

void Simulation::irregular_hop(Tick t, NodeId id) {
  const auto& costs = scenario_.costs;
  const NodeId base = topology_.base();
  const IncidentId incident = carrying_.at(id).front();

  HopRecord hop;
  hop.tick = t;
  hop.node = id;
  hop.self_dist2 = topology_.dist2_fixed(id, base);

  const Packet q = make_query(node(id));
  charge(t, id, DebitCause::QuerySend, unit_cost(costs, PacketKind::Query, Direction::Send));
  auto& qrec = record(t, q, std::nullopt);
  std::vector<std::pair<NodeId, Packet>> acks;
  for (NodeId nb : topology_.neighbors(id)) {
    if (!node(nb).alive) continue;
    if (lost()) {
      qrec.dropped.push_back(nb);
      continue;
    }
    accept(t, qrec, nb);
    if (topology_.is_base(nb)) {
      // The base always listens and always answers.
      auto b = node(nb);
      b.adj[id] = t;
      mut(nb) = b;
      acks.emplace_back(nb, make_ack(b, false));
      continue;
    }
    charge(t, nb, DebitCause::QueryRecv, unit_cost(costs, PacketKind::Query, Direction::Receive));
    if (!node(nb).alive) continue;
    auto [state, reply] = handle_query(node(nb), q, t);
    mut(nb) = std::move(state);
    if (reply) {
      charge(t, nb, DebitCause::AckSend, unit_cost(costs, PacketKind::Ack, Direction::Send));
      acks.emplace_back(nb, std::move(*reply));
    }
  }
  for (auto& [from, ack] : acks) {
    auto& arec = record(t, ack, id);
    if (!node(id).alive || lost()) {
      arec.dropped.push_back(id);
      continue;
    }
    accept(t, arec, id);
    charge(t, id, DebitCause::AckRecv, unit_cost(costs, PacketKind::Ack, Direction::Receive));
    hop.replies.push_back(Reply{from, ack.body.energy, topology_.dist2_fixed(from, base)});
  }

  // Nearest to base among repliers above the threshold; ties go to the
  // higher energy, then the lower id.
  const Reply* best = nullptr;
  for (const auto& r : hop.replies) {
    if (!(r.energy > costs.threshold)) continue;
    if (best == nullptr ||
        std::make_tuple(r.dist2, -r.energy, r.node) < std::make_tuple(best->dist2, -best->energy, best->node)) {
      best = &r;
    }
  }

  auto& inc = trace_.incidents[incident - 1];
  bool handed_off = false;
  if (best == nullptr || !node(id).alive) {
    inc.hops.push_back(std::move(hop));
    spdlog::debug("tick {}: node {} found no eligible next hop for incident {}", t, id.value, incident);
  } else {
    const NodeId next = best->node;
    hop.chosen = next;
    const Packet src = make_source(node(id), inc.message);
    charge(t, id, DebitCause::SourceSend, unit_cost(costs, PacketKind::Source, Direction::Send));
    charge(t, id, DebitCause::SourceHandoff, unit_cost(costs, PacketKind::Source, Direction::Send));
    if (!node(id).alive) {
      // Exhausted while sending; its incidents were dropped with it.
      inc.hops.push_back(std::move(hop));
      return;
    }
    auto& srec = record(t, src, next);
    const bool arrived = node(next).alive && !lost();
    if (arrived) handed_off = true;
    if (!arrived) {
      srec.dropped.push_back(next);
    } else {
      accept(t, srec, next);
      std::optional<Packet> reset_ack;
      if (topology_.is_base(next)) {
        deliver_to_base(t, id, incident, src);
        auto b = node(next);
        b.flags = kIrregular;
        b.mode = Mode::S;
        reset_ack = make_ack(b, true);
      } else {
        charge(t, next, DebitCause::SourceRecv, unit_cost(costs, PacketKind::Source, Direction::Receive));
        if (node(next).alive) {
          auto [state, ack] = handle_source(node(next), src);
          mut(next) = std::move(state);
          charge(t, next, DebitCause::ResetSend, unit_cost(costs, PacketKind::Ack, Direction::Send));
          carrying_[next].push_back(incident);
          reset_ack = std::move(ack);
        } else {
          handed_off = false;
        }
      }
      if (inc.path.back() != next) inc.path.push_back(next);
      if (reset_ack) {
        auto& rrec = record(t, *reset_ack, id);
        if (node(id).alive && !lost()) {
          accept(t, rrec, id);
          charge(t, id, DebitCause::ResetRecv, unit_cost(costs, PacketKind::Ack, Direction::Receive));
          hop.completed = true;
        } else {
          rrec.dropped.push_back(id);
        }
      }
    }
    inc.hops.push_back(std::move(hop));
    if (handed_off) {
      // The incident now travels with the next hop. A sender that missed the
      // RESET stays S and is cleared on its next turn.
      pop_carried(id);
      if (inc.hops.back().completed && node(id).alive && !carrying_.contains(id)) mut(id) = reset_node(node(id));
      return;
    }
  }

  // Dead end or lost Source: retry next tick until the attempt budget is spent.
  if (!inc.delivered && inc.hops.size() >= topology_.size()) {
    inc.abandoned = true;
    pop_carried(id);
    if (node(id).alive && node(id).mode == Mode::S && !carrying_.contains(id)) mut(id) = reset_node(node(id));
    spdlog::info("tick {}: incident {} abandoned at node {}", t, incident, id.value);
  }
}

void Simulation::pop_carried(NodeId id) {
  auto it = carrying_.find(id);
  if (it == carrying_.end()) return;
  if (!it->second.empty()) it->second.pop_front();
  if (it->second.empty()) carrying_.erase(it);
}

void Simulation::petrol_phase(Tick t, const std::map<NodeId, Dispatch>& dispatch) {
  const auto& costs = scenario_.costs;
  const std::size_t cap = hop_cap();
  for (NodeId id : topology_.ids()) {
    if (dispatch.at(id) != Dispatch::PetrolFlow) continue;
    const auto& n = node(id);
    if (!n.alive || !n.flags.flag2) continue;
    if (n.flood_level >= cap) continue;
    const IncidentId incident = flood_incident_.at(id);

    Packet src = make_source(n, trace_.incidents[incident - 1].message);
    src.header.hop_count = n.flood_level;
    charge(t, id, DebitCause::FloodSend, unit_cost(costs, PacketKind::Source, Direction::Send));
    auto& rec = record(t, src, std::nullopt);
    for (NodeId nb : topology_.neighbors(id)) {
      if (!node(nb).alive) continue;
      if (lost()) {
        rec.dropped.push_back(nb);
        continue;
      }
      accept(t, rec, nb);
      if (topology_.is_base(nb)) {
        if (!wave_.active) {
          deliver_to_base(t, id, incident, src);
          wave_.active = true;
          wave_.ready_tick = t + 1;
          wave_.hop = 0;
          wave_.frontier = {nb};
          wave_.immune.clear();
        }
        continue;
      }
      charge(t, nb, DebitCause::FloodRecv, unit_cost(costs, PacketKind::Source, Direction::Receive));
      if (!node(nb).alive || wave_.immune.contains(nb)) continue;
      const bool was_flooding = node(nb).flags.flag2;
      mut(nb) = handle_source(node(nb), src).state;
      if (!was_flooding) {
        flood_incident_[nb] = incident;
        drop_carried(nb);
      }
    }
  }
}

void Simulation::wave_phase(Tick t) {
  if (!wave_.active || t < wave_.ready_tick) return;
  const auto& costs = scenario_.costs;
  std::set<NodeId> next;
  ++wave_.hop;
  for (NodeId f : wave_.frontier) {
    if (!node(f).alive) continue;
    auto sender = node(f);
    sender.flags = kRegular;
    Packet reset = make_ack(sender, true);
    charge(t, f, DebitCause::WaveSend, unit_cost(costs, PacketKind::Ack, Direction::Send));
    auto& rec = record(t, reset, std::nullopt);
    for (NodeId nb : topology_.neighbors(f)) {
      if (!node(nb).alive || topology_.is_base(nb)) continue;
      if (lost()) {
        rec.dropped.push_back(nb);
        continue;
      }
      accept(t, rec, nb);
      charge(t, nb, DebitCause::WaveRecv, unit_cost(costs, PacketKind::Ack, Direction::Receive));
      const auto& r = node(nb);
      if (!r.alive || !r.flags.flag2 || wave_.immune.contains(nb)) continue;
      mut(nb) = reset_node(r);
      flood_incident_.erase(nb);
      wave_.immune.insert(nb);
      next.insert(nb);
      trace_.reset_wave.push_back(WaveRecord{t, nb, wave_.hop});
    }
  }
  wave_.frontier.assign(next.begin(), next.end());
  if (wave_.frontier.empty()) {
    wave_.active = false;
    wave_.immune.clear();
    trace_.base.flags = kRegular;
    trace_.base.mode = Mode::C;
    trace_.base.status = "Network is fine";
    spdlog::info("tick {}: reset wave complete", t);
  }
}

void Simulation::sense_phase(Tick t) {
  auto [first, last] = events_.equal_range(t);
  for (auto it = first; it != last; ++it) {
    const auto& ev = it->second;
    const auto& before = node(ev.node);
    if (!before.alive || before.base) continue;
    const Flags old = before.flags;
    auto after = sense_and_classify(before, ev.reading, scenario_.thresholds);
    mut(ev.node) = after;
    if (after.flags.flag2 && !old.flag2) {
      drop_carried(ev.node);
      mut(ev.node).flood_level = 0;
      flood_incident_[ev.node] =
          open_incident(IncidentKind::Devastating, ev.node, affected_message(ev.node, after.pos), t, ev.node);
      spdlog::info("tick {}: devastating reading {} at node {}", t, ev.reading, ev.node.value);
    } else if (after.flags == kIrregular && ev.reading > scenario_.thresholds.irregular_level) {
      carrying_[ev.node].push_back(
          open_incident(IncidentKind::Irregular, ev.node, affected_message(ev.node, after.pos), t, ev.node));
      spdlog::info("tick {}: irregular reading {} at node {}", t, ev.reading, ev.node.value);
    }
  }
}

void Simulation::maintenance_phase(Tick t) {
  for (NodeId id : topology_.ids()) {
    const auto& n = node(id);
    if (!n.alive || n.base) continue;
    mut(id) = expire_neighbors(n, t, neighbor_timeout());
    auto [state, alert] = isolation_check(node(id));
    mut(id) = std::move(state);
    if (alert) broadcast_alert(t, id, *alert);
  }
}

void Simulation::broadcast_alert(Tick t, NodeId id, const Packet& alert) {
  const auto& costs = scenario_.costs;
  spdlog::info("tick {}: node {} lost all neighbors", t, id.value);
  charge(t, id, DebitCause::AlertSend, isolation_cost(costs));
  auto& rec = record(t, alert, std::nullopt);
  for (NodeId nb : topology_.neighbors(id)) {
    if (!node(nb).alive) continue;
    if (lost()) {
      rec.dropped.push_back(nb);
      continue;
    }
    accept(t, rec, nb);
    if (topology_.is_base(nb)) {
      const IncidentId direct = open_incident(IncidentKind::Isolation, id, alert.body.message, t, id);
      trace_.incidents[direct - 1].path.push_back(nb);
      deliver_to_base(t, id, direct, alert);
      continue;
    }
    charge(t, nb, DebitCause::AlertRecv, unit_cost(costs, PacketKind::Source, Direction::Receive));
    auto relay = node(nb);
    if (!relay.alive || relay.mode == Mode::S) continue;
    // The receiver relays the alert towards the base as its own incident.
    relay.pre_s_mode = relay.mode;
    relay.mode = Mode::S;
    relay.flags = kIrregular;
    mut(nb) = relay;
    carrying_[nb].push_back(open_incident(IncidentKind::Isolation, id, alert.body.message, t, nb));
  }
}

void Simulation::transition_phase(const std::map<NodeId, Dispatch>& dispatch) {
  for (auto& n : nodes_) {
    if (dispatch.at(n.id) != Dispatch::Regular) continue;
    if (!n.alive || n.mode == Mode::S || !n.flags.clear()) continue;
    n = tick_transition(n);
  }
}

Trace run(const Scenario& scenario) {
  Simulation sim(scenario);
  sim.run();
  return sim.trace();
}

}  // namespace qcs
