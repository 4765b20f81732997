#include "qcs/energy.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qcs/error.hpp"

namespace qcs {

namespace {

constexpr double kSupplyCurrentMilliamp = 18.7;
constexpr double kSupplyVoltage = 2.6;
constexpr std::uint64_t kEnergyStream = 0x656e65726779ULL;

}  // namespace

void CostModel::validate() const {
  if (e1 <= 0 || e2 <= 0 || ep < 0 || isolation_multiplier < 0) {
    throw Error(ErrorCode::Validation, "unit costs must be positive");
  }
  if (e2 != 2 * e1) {
    throw Error(ErrorCode::Validation, fmt::format("e2 ({}) must be twice e1 ({})", e2, e1));
  }
  if (!(threshold < init_min)) {
    throw Error(ErrorCode::Validation, fmt::format("threshold {} must be below init_min {}", threshold, init_min));
  }
  if (init_min > init_max || init_min <= 0) {
    throw Error(ErrorCode::Validation, fmt::format("bad initial energy range [{}, {}]", init_min, init_max));
  }
}

Units unit_cost(const CostModel& costs, PacketKind kind, Direction) {
  return kind == PacketKind::Source ? costs.e2 : costs.e1;
}

double send_time_ms(std::size_t packet_bytes) {
  switch (packet_bytes) {
    case encoded_size(PacketKind::Query): return 20.0;
    case encoded_size(PacketKind::Source): return 40.0;
    default:
      throw Error(ErrorCode::Domain, fmt::format("no timing for {}-byte packets (only 24 and 64)", packet_bytes));
  }
}

double joules(std::size_t packet_bytes) {
  return send_time_ms(packet_bytes) / 1000.0 * kSupplyCurrentMilliamp * kSupplyVoltage;
}

std::int64_t lifetime(double energy, double e1, double ep) {
  if (!std::isfinite(energy) || energy < 0.0 || e1 < 0.0 || ep < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "lifetime needs finite non-negative E, e1, ep");
  }
  const double per_period = e1 + ep;
  if (per_period <= 0.0) {
    throw Error(ErrorCode::Domain, "e1 + ep is zero");
  }
  return static_cast<std::int64_t>(std::floor(energy / per_period));
}

Units s_mode_cost(std::size_t replies, const CostModel& costs) {
  return costs.e1 + static_cast<Units>(replies) * costs.e1 + 2 * costs.e2 + costs.e1;
}

Units draw_initial_energy(std::uint64_t seed, NodeId node, const CostModel& costs, bool is_base) {
  if (is_base) return kInfiniteEnergy;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kEnergyStream), std::uint32_t{node.value}};
  std::mt19937_64 gen(seq);
  std::uniform_int_distribution<Units> dist(costs.init_min, costs.init_max);
  return dist(gen);
}

Units isolation_cost(const CostModel& costs) { return costs.isolation_multiplier * costs.e2; }

const char* cause_name(DebitCause cause) {
  switch (cause) {
    case DebitCause::QuerySend: return "query_send";
    case DebitCause::QueryRecv: return "query_recv";
    case DebitCause::AckSend: return "ack_send";
    case DebitCause::AckRecv: return "ack_recv";
    case DebitCause::SourceSend: return "source_send";
    case DebitCause::SourceHandoff: return "source_handoff";
    case DebitCause::SourceRecv: return "source_recv";
    case DebitCause::ResetSend: return "reset_send";
    case DebitCause::ResetRecv: return "reset_recv";
    case DebitCause::FloodSend: return "flood_send";
    case DebitCause::FloodRecv: return "flood_recv";
    case DebitCause::WaveSend: return "wave_send";
    case DebitCause::WaveRecv: return "wave_recv";
    case DebitCause::AlertSend: return "alert_send";
    case DebitCause::AlertRecv: return "alert_recv";
  }
  return "?";
}

void EnergyLedger::open(NodeId node, Units initial) {
  if (initial < 0) throw Error(ErrorCode::InvalidArgument, "negative initial energy");
  accounts_[node] = Account{initial, initial};
}

const EnergyLedger::Account& EnergyLedger::account(NodeId node) const {
  auto it = accounts_.find(node);
  if (it == accounts_.end()) throw Error(ErrorCode::UnknownNode, fmt::format("no ledger account for node {}", node.value));
  return it->second;
}

Units EnergyLedger::debit(Tick tick, NodeId node, DebitCause cause, Units amount) {
  if (amount < 0) throw Error(ErrorCode::InvalidArgument, "negative debit");
  auto it = accounts_.find(node);
  if (it == accounts_.end()) throw Error(ErrorCode::UnknownNode, fmt::format("no ledger account for node {}", node.value));
  auto& acct = it->second;
  if (is_infinite(acct.balance)) return 0;
  const Units drawn = std::min(amount, acct.balance);
  acct.balance -= drawn;
  entries_.push_back(Debit{tick, node, cause, drawn, acct.balance});
  return drawn;
}

Units EnergyLedger::balance(NodeId node) const { return account(node).balance; }
Units EnergyLedger::initial(NodeId node) const { return account(node).initial; }

Units EnergyLedger::consumed(NodeId node) const {
  const auto& a = account(node);
  return is_infinite(a.initial) ? 0 : a.initial - a.balance;
}

bool EnergyLedger::audit() const {
  std::map<NodeId, Units> spent;
  for (const auto& d : entries_) {
    if (d.amount < 0) return false;
    spent[d.node] += d.amount;
  }
  for (const auto& [node, acct] : accounts_) {
    if (is_infinite(acct.initial)) {
      if (!is_infinite(acct.balance) || spent.contains(node)) return false;
      continue;
    }
    if (acct.balance != acct.initial - spent[node]) return false;
  }
  return true;
}

void EnergyLedger::write_csv(std::ostream& out) const {
  out << "tick,node_id,cause,debit,balance\n";
  for (const auto& d : entries_) {
    fmt::print(out, "{},{},{},{},{}\n", d.tick, d.node.value, cause_name(d.cause), d.amount, d.balance);
  }
}

}  // namespace qcs
