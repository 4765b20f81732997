#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "qcs/packet.hpp"
#include "qcs/types.hpp"

namespace qcs {

/// Abstract unit costs. Processing energy is folded into e1/e2, so ep is only
/// used by the analytic lifetime report.
struct CostModel {
  Units e1{1};
  Units e2{2};
  Units ep{0};
  Units threshold{500};
  Units init_min{3000};
  Units init_max{5000};
  Units isolation_multiplier{2};

  /// e2 == 2 * e1, threshold < init_min <= init_max, all costs positive.
  void validate() const;
};

enum class Direction { Send, Receive };

Units unit_cost(const CostModel& costs, PacketKind kind, Direction direction);

/// Radio energy, in millijoules, to send one packet of the given size:
/// E = t * 18.7 mA * 2.6 V with t = 20 ms for 24 bytes and 40 ms for 64 bytes.
double joules(std::size_t packet_bytes);

/// Transmission time in milliseconds for the two supported packet sizes.
double send_time_ms(std::size_t packet_bytes);

/// floor(E / (e1 + ep)): whole regular periods a node sustains.
std::int64_t lifetime(double energy, double e1, double ep);

/// Closed form of one irregular hop's cost to the S node:
/// query broadcast (e1) + replies acks (e1 each) + Source exchange (2 * e2)
/// + RESET ack (e1). With default costs this is 6 + replies.
Units s_mode_cost(std::size_t replies, const CostModel& costs = {});

/// Uniform integer in [init_min, init_max], a pure function of (seed, node).
/// The base station gets kInfiniteEnergy.
Units draw_initial_energy(std::uint64_t seed, NodeId node, const CostModel& costs, bool is_base = false);

Units isolation_cost(const CostModel& costs);

enum class DebitCause : std::uint8_t {
  QuerySend,
  QueryRecv,
  AckSend,
  AckRecv,
  SourceSend,
  SourceHandoff,
  SourceRecv,
  ResetSend,
  ResetRecv,
  FloodSend,
  FloodRecv,
  WaveSend,
  WaveRecv,
  AlertSend,
  AlertRecv,
};

const char* cause_name(DebitCause cause);

struct Debit {
  Tick tick{0};
  NodeId node{};
  DebitCause cause{};
  Units amount{0};
  Units balance{0};
};

class EnergyLedger {
 public:
  void open(NodeId node, Units initial);

  /// Draws up to `amount` from the node's balance and returns what was drawn.
  /// Balances never go negative; accounts holding kInfiniteEnergy are never
  /// debited and produce no entry.
  Units debit(Tick tick, NodeId node, DebitCause cause, Units amount);

  Units balance(NodeId node) const;
  Units initial(NodeId node) const;
  Units consumed(NodeId node) const;

  const std::vector<Debit>& entries() const { return entries_; }

  /// balance == initial - sum(debits) for every account and no debit negative.
  bool audit() const;

  /// tick,node_id,cause,debit,balance
  void write_csv(std::ostream& out) const;

 private:
  struct Account {
    Units initial{0};
    Units balance{0};
  };
  const Account& account(NodeId node) const;

  std::map<NodeId, Account> accounts_;
  std::vector<Debit> entries_;
};

}  // namespace qcs
