#include "qcs/node.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "qcs/error.hpp"

namespace qcs {

namespace {

constexpr std::uint32_t kModeStream = 0x6d6f6465u;

void promote(NodeState& n, Flags flags) {
  if (n.mode != Mode::S) {
    n.pre_s_mode = n.mode;
    n.mode = Mode::S;
  }
  n.flags.flag1 = n.flags.flag1 || flags.flag1;
  n.flags.flag2 = n.flags.flag2 || flags.flag2;
}

}  // namespace

void Thresholds::validate() const {
  if (!(irregular_level < devastating_level)) {
    throw Error(ErrorCode::Validation, fmt::format("irregular level {} must be below devastating level {}",
                                                   irregular_level, devastating_level));
  }
}

std::set<NodeId> NodeState::neighbor_set() const {
  std::set<NodeId> out;
  for (const auto& [id, heard] : adj) out.insert(id);
  return out;
}

std::map<NodeId, Mode> init_modes(const Topology& topology, std::uint64_t seed) {
  std::vector<NodeId> order;
  for (NodeId id : topology.ids()) {
    if (!topology.is_base(id)) order.push_back(id);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), kModeStream};
  std::mt19937_64 gen(seq);
  std::shuffle(order.begin(), order.end(), gen);

  std::map<NodeId, Mode> modes;
  for (NodeId id : order) {
    if (modes.contains(id)) continue;
    modes[id] = Mode::Q;
    for (NodeId nb : topology.neighbors(id)) {
      if (!topology.is_base(nb) && !modes.contains(nb)) modes[nb] = Mode::C;
    }
  }
  return modes;
}

NodeState sense_and_classify(NodeState n, double reading, const Thresholds& th) {
  if (!n.alive) throw Error(ErrorCode::Contract, fmt::format("node {} is not alive", n.id.value));
  n.sensed = reading;
  if (reading > th.devastating_level) {
    promote(n, kDevastating);
  } else if (reading > th.irregular_level) {
    promote(n, kIrregular);
  }
  return n;
}

NodeState tick_transition(NodeState n) {
  if (n.mode == Mode::S || !n.flags.clear()) {
    throw Error(ErrorCode::Contract, fmt::format("node {} is not in regular mode", n.id.value));
  }
  n.mode = n.mode == Mode::Q ? Mode::C : Mode::Q;
  return n;
}

Transition handle_query(NodeState n, const Packet& q, Tick now) {
  if (q.header.src != n.id) n.adj[q.header.src] = now;
  std::optional<Packet> reply;
  if (q.header.flags.flag1 && n.mode != Mode::S) {
    reply = make_ack(n, false);
  }
  return {std::move(n), std::move(reply)};
}

Transition handle_source(NodeState n, const Packet& s) {
  if (s.header.flags.flag2) {
    const auto level = static_cast<std::uint8_t>(std::min<int>(s.header.hop_count + 1, 255));
    if (n.flags.flag2) {
      n.flood_level = std::min(n.flood_level, level);
    } else {
      promote(n, kDevastating);
      n.flood_level = level;
    }
    return {std::move(n), std::nullopt};
  }
  promote(n, kIrregular);
  auto ack = make_ack(n, true);
  return {std::move(n), std::move(ack)};
}

NodeState reset_node(NodeState n) {
  if (n.mode != Mode::S) {
    throw Error(ErrorCode::Contract, fmt::format("reset of node {} which is not S", n.id.value));
  }
  n.flags = kRegular;
  n.mode = n.pre_s_mode;
  n.flood_level = 0;
  return n;
}

Transition isolation_check(NodeState n) {
  std::optional<Packet> alert;
  const bool has = !n.adj.empty();
  if (n.had_neighbors && !has && n.alive) {
    alert = Packet{{PacketKind::Source, kIrregular, n.id, 0}, {n.pos, n.energy, disconnected_message(n.id)}};
  }
  n.had_neighbors = has;
  return {std::move(n), std::move(alert)};
}

NodeState refresh_neighbor(NodeState n, NodeId from, Tick now) {
  if (auto it = n.adj.find(from); it != n.adj.end()) it->second = now;
  return n;
}

NodeState expire_neighbors(NodeState n, Tick now, Tick timeout) {
  std::erase_if(n.adj, [&](const auto& kv) { return now - kv.second > timeout; });
  return n;
}

}  // namespace qcs
