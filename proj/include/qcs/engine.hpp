#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qcs/energy.hpp"
#include "qcs/node.hpp"
#include "qcs/packet.hpp"
#include "qcs/scenario.hpp"
#include "qcs/topology.hpp"

namespace qcs {

/// Which routine handles a node during a tick, decided from its flags at the
/// start of the tick.
enum class Dispatch : std::uint8_t { Regular, Irregular, PetrolFlow, Idle };

const char* dispatch_name(Dispatch d);

using IncidentId = std::uint32_t;

struct PacketRecord {
  Tick tick{0};
  std::uint64_t seq{0};
  Packet packet;
  /// Unset for broadcasts.
  std::optional<NodeId> dest;
  std::vector<NodeId> received;
  std::vector<NodeId> dropped;
};

struct Reply {
  NodeId node{};
  Units energy{0};
  /// Squared distance to the base in fixed-point units.
  std::int64_t dist2{0};
};

struct HopRecord {
  Tick tick{0};
  NodeId node{};
  std::int64_t self_dist2{0};
  std::vector<Reply> replies;
  std::optional<NodeId> chosen;
  /// The RESET Ack (or base receipt) closed the hop.
  bool completed{false};
};

enum class IncidentKind : std::uint8_t { Irregular, Devastating, Isolation };

const char* incident_kind_name(IncidentKind kind);

struct IncidentRecord {
  IncidentId id{0};
  IncidentKind kind{IncidentKind::Irregular};
  NodeId origin{};
  std::string message;
  Tick start_tick{0};
  /// Nodes that carried the incident, in order, ending at the base when delivered.
  std::vector<NodeId> path;
  std::vector<HopRecord> hops;
  bool delivered{false};
  std::optional<Tick> delivery_tick;
  bool abandoned{false};

  std::vector<std::size_t> replies_per_hop() const;
};

struct BaseMessage {
  Tick tick{0};
  NodeId from{};
  IncidentId incident{0};
  std::string message;
};

struct WaveRecord {
  Tick tick{0};
  NodeId node{};
  std::uint32_t hop{0};
};

struct NodeTickRecord {
  Tick tick{0};
  NodeId node{};
  Mode mode{Mode::C};
  Flags flags{};
  Dispatch dispatch{Dispatch::Idle};
  std::uint32_t sent{0};
  std::uint32_t received{0};
  Units debit{0};
  Units energy{0};
  bool alive{true};
};

/// Base station status in the shape of the paper-era MATLAB record.
struct BaseRecord {
  NodeId id{};
  Units energy{kInfiniteEnergy};
  Position loc{};
  Flags flags{};
  Mode mode{Mode::C};
  std::string msg;
  std::string status;
  std::set<NodeId> disconnected;
};

struct Trace {
  std::vector<NodeTickRecord> node_ticks;
  // deque: records stay put while later packets are appended.
  std::deque<PacketRecord> packets;
  std::vector<IncidentRecord> incidents;
  std::vector<BaseMessage> base_inbox;
  std::vector<WaveRecord> reset_wave;
  std::vector<std::pair<Tick, std::string>> base_log;
  EnergyLedger ledger;
  BaseRecord base;
};

class Simulation {
 public:
  explicit Simulation(Scenario scenario);

  /// Next tick to execute.
  Tick now() const { return now_; }
  bool finished() const { return now_ >= scenario_.sim.horizon; }

  void step();
  /// Steps until the horizon.
  void run();
  /// Steps until no incident is open and no node is S, or the horizon.
  void run_until_quiet();

  /// Adds an event for a tick that has not run yet.
  void inject(const SenseEvent& event);

  bool quiet() const;

  const Scenario& scenario() const { return scenario_; }
  const Topology& topology() const { return topology_; }
  const std::vector<NodeState>& nodes() const { return nodes_; }
  const NodeState& node(NodeId id) const;
  const std::map<NodeId, Mode>& initial_modes() const { return initial_modes_; }
  const Trace& trace() const { return trace_; }
  const EnergyLedger& ledger() const { return trace_.ledger; }
  const BaseRecord& base_record() const { return trace_.base; }
  std::size_t hop_cap() const { return topology_.size() / 2; }
  Tick neighbor_timeout() const;

 private:
  struct TickCounters {
    std::uint32_t sent{0};
    std::uint32_t received{0};
    Units debit{0};
  };

  struct ResetWave {
    bool active{false};
    Tick ready_tick{0};
    std::uint32_t hop{0};
    std::vector<NodeId> frontier;
    std::set<NodeId> immune;
  };

  NodeState& mut(NodeId id);
  Dispatch classify(const NodeState& n) const;
  bool lost();
  void charge(Tick t, NodeId id, DebitCause cause, Units amount);
  void count_sent(NodeId id) { counters_[id].sent++; }
  void count_received(NodeId id) { counters_[id].received++; }
  PacketRecord& record(Tick t, const Packet& p, std::optional<NodeId> dest);
  /// Marks rx as a receiver of rec; hearing a known neighbor refreshes it.
  void accept(Tick t, PacketRecord& rec, NodeId rx);

  IncidentId open_incident(IncidentKind kind, NodeId origin, std::string message, Tick t, NodeId carrier);
  void drop_carried(NodeId id);
  void pop_carried(NodeId id);
  void deliver_to_base(Tick t, NodeId from, IncidentId incident, const Packet& p);

  void regular_phase(Tick t, const std::map<NodeId, Dispatch>& dispatch);
  void irregular_phase(Tick t, const std::map<NodeId, Dispatch>& dispatch);
  void irregular_hop(Tick t, NodeId id);
  void petrol_phase(Tick t, const std::map<NodeId, Dispatch>& dispatch);
  void wave_phase(Tick t);
  void sense_phase(Tick t);
  void maintenance_phase(Tick t);
  void broadcast_alert(Tick t, NodeId id, const Packet& alert);
  void transition_phase(const std::map<NodeId, Dispatch>& dispatch);

  Scenario scenario_;
  Topology topology_;
  std::vector<NodeState> nodes_;
  std::map<NodeId, std::size_t> index_;
  std::map<NodeId, Mode> initial_modes_;
  std::multimap<Tick, SenseEvent> events_;
  std::mt19937_64 loss_rng_;
  Tick now_{0};
  std::uint64_t seq_{0};

  std::map<NodeId, std::deque<IncidentId>> carrying_;
  std::map<NodeId, IncidentId> flood_incident_;
  ResetWave wave_;
  std::map<NodeId, TickCounters> counters_;
  Trace trace_;
};

/// Runs the scenario to its horizon.
Trace run(const Scenario& scenario);

/// Sum over hops of 2 * repliers: each candidate costs one threshold check and
/// one comparison against the incumbent nearest-to-base distance.
std::uint64_t count_comparisons(const std::vector<std::size_t>& replies_per_hop);

}  // namespace qcs
