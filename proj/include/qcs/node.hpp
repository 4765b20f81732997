#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "qcs/packet.hpp"
#include "qcs/topology.hpp"
#include "qcs/types.hpp"

namespace qcs {

struct Thresholds {
  double irregular_level{50.0};
  double devastating_level{80.0};

  void validate() const;
};

struct NodeState {
  NodeId id{};
  Position pos{};
  Mode mode{Mode::C};
  /// Mode held immediately before the last promotion to S.
  Mode pre_s_mode{Mode::C};
  Flags flags{};
  Units energy{0};
  /// Learned adjacency: neighbor -> tick it was last heard.
  std::map<NodeId, Tick> adj;
  double sensed{0.0};
  bool alive{true};
  bool base{false};
  /// Hop distance from the flood origin while in petrol flow.
  std::uint8_t flood_level{0};
  /// adj was non-empty at the previous isolation check.
  bool had_neighbors{false};

  std::set<NodeId> neighbor_set() const;
};

/// A handler's output: the successor state and at most one emitted packet.
struct Transition {
  NodeState state;
  std::optional<Packet> emit;
};

/// Greedy maximal independent set over a seed-shuffled node order. Returns Q
/// for the chosen set, C for the rest. The base station is not colored.
std::map<NodeId, Mode> init_modes(const Topology& topology, std::uint64_t seed);

/// Irregular reading sets flag1, devastating sets both; either promotes to S
/// whatever the present mode. A reading at or below irregular_level changes
/// nothing but the stored value.
NodeState sense_and_classify(NodeState n, double reading, const Thresholds& th);

/// Q -> C, C -> Q. Throws Error(Contract) on an S node or with flags set.
NodeState tick_transition(NodeState n);

/// Learns q.src as a neighbor. Replies with an Ack carrying position and
/// energy only when q has flag1 and n is not itself S.
Transition handle_query(NodeState n, const Packet& q, Tick now);

/// Unicast Source (flags 1,0): n becomes S with flag1 and answers with a
/// RESET Ack. Broadcast Source (flags 1,1): n becomes S with both flags and
/// stays silent.
Transition handle_source(NodeState n, const Packet& s);

/// Clears flags and restores the pre-promotion mode. Throws Error(Contract)
/// when n is not S.
NodeState reset_node(NodeState n);

/// Emits a disconnect alert when adj went from non-empty to empty since the
/// previous check.
Transition isolation_check(NodeState n);

/// Refreshes an already-learned neighbor without adding new ones.
NodeState refresh_neighbor(NodeState n, NodeId from, Tick now);

/// Drops neighbors not heard for more than `timeout` ticks.
NodeState expire_neighbors(NodeState n, Tick now, Tick timeout);

}  // namespace qcs
