#include "qcs_sim.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qcs/batch.hpp"
#include "qcs/energy.hpp"
#include "qcs/engine.hpp"
#include "qcs/error.hpp"
#include "qcs/metrics.hpp"
#include "qcs/packet.hpp"
#include "qcs/scenario.hpp"

struct qcs_scenario {
  qcs::Scenario value;
};

struct qcs_sim {
  explicit qcs_sim(qcs::Scenario s) : value(std::move(s)) {}
  qcs::Simulation value;
};

struct qcs_batch {
  qcs::Topology topology;
  std::vector<qcs::SweepRun> runs;
};

namespace {

thread_local std::string g_last_error;

qcs_status to_status(qcs::ErrorCode code) {
  switch (code) {
    case qcs::ErrorCode::InvalidArgument: return QCS_ERR_INVALID_ARGUMENT;
    case qcs::ErrorCode::Parse: return QCS_ERR_PARSE;
    case qcs::ErrorCode::Validation: return QCS_ERR_VALIDATION;
    case qcs::ErrorCode::Io: return QCS_ERR_IO;
    case qcs::ErrorCode::UnknownNode: return QCS_ERR_UNKNOWN_NODE;
    case qcs::ErrorCode::Capacity: return QCS_ERR_CAPACITY;
    case qcs::ErrorCode::Domain: return QCS_ERR_DOMAIN;
    case qcs::ErrorCode::Contract: return QCS_ERR_CONTRACT;
  }
  return QCS_ERR_INTERNAL;
}

qcs_status fail(qcs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
qcs_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return QCS_OK;
  } catch (const qcs::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QCS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QCS_ERR_INTERNAL, e.what());
  }
}

#define QCS_REQUIRE(ptr)                                                     \
  do {                                                                       \
    if ((ptr) == nullptr) return fail(QCS_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

qcs::NodeId node_id(std::uint16_t id) { return qcs::NodeId{id}; }

void copy_message(char* dst, std::size_t cap, const std::string& src) {
  const auto n = std::min(cap - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

}  // namespace

extern "C" {

const char* qcs_status_name(qcs_status status) {
  switch (status) {
    case QCS_OK: return "ok";
    case QCS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QCS_ERR_PARSE: return "parse";
    case QCS_ERR_VALIDATION: return "validation";
    case QCS_ERR_IO: return "io";
    case QCS_ERR_UNKNOWN_NODE: return "unknown_node";
    case QCS_ERR_CAPACITY: return "capacity";
    case QCS_ERR_DOMAIN: return "domain";
    case QCS_ERR_CONTRACT: return "contract";
    case QCS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qcs_last_error(void) { return g_last_error.c_str(); }

qcs_status qcs_set_log_level(const char* level) {
  return guarded([&] {
    static const bool installed = [] {
      spdlog::set_default_logger(spdlog::stderr_color_mt("qcs"));
      return true;
    }();
    (void)installed;
    const std::string name = level != nullptr && *level != '\0' ? level : "warn";
    const auto parsed = spdlog::level::from_str(name);
    if (parsed == spdlog::level::off && name != "off") {
      throw qcs::Error(qcs::ErrorCode::InvalidArgument, "unknown log level '" + name + "'");
    }
    spdlog::set_level(parsed);
  });
}

qcs_status qcs_scenario_load_file(const char* path, qcs_scenario** out) {
  QCS_REQUIRE(path);
  QCS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new qcs_scenario{qcs::load_scenario_file(path)}; });
}

qcs_status qcs_scenario_parse(const char* text, qcs_scenario** out) {
  QCS_REQUIRE(text);
  QCS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new qcs_scenario{qcs::parse_scenario(text)}; });
}

void qcs_scenario_free(qcs_scenario* scenario) { delete scenario; }

qcs_status qcs_scenario_set_seed(qcs_scenario* scenario, uint64_t seed) {
  QCS_REQUIRE(scenario);
  scenario->value.sim.seed = seed;
  return QCS_OK;
}

qcs_status qcs_scenario_set_loss(qcs_scenario* scenario, double loss_prob) {
  QCS_REQUIRE(scenario);
  return guarded([&] {
    auto copy = scenario->value;
    copy.sim.loss_prob = loss_prob;
    copy.validate();
    scenario->value = std::move(copy);
  });
}

qcs_status qcs_scenario_set_horizon(qcs_scenario* scenario, uint32_t horizon) {
  QCS_REQUIRE(scenario);
  return guarded([&] {
    auto copy = scenario->value;
    copy.sim.horizon = horizon;
    copy.validate();
    scenario->value = std::move(copy);
  });
}

qcs_status qcs_scenario_add_event(qcs_scenario* scenario, uint32_t tick, uint16_t node, double reading) {
  QCS_REQUIRE(scenario);
  return guarded([&] {
    auto copy = scenario->value;
    copy.events.push_back(qcs::SenseEvent{tick, node_id(node), reading});
    copy.validate();
    scenario->value = std::move(copy);
  });
}

qcs_status qcs_scenario_node_count(const qcs_scenario* scenario, size_t* count) {
  QCS_REQUIRE(scenario);
  QCS_REQUIRE(count);
  *count = scenario->value.layout.nodes.size();
  return QCS_OK;
}

qcs_status qcs_scenario_node_ids(const qcs_scenario* scenario, uint16_t* ids, size_t capacity, size_t* count) {
  QCS_REQUIRE(scenario);
  QCS_REQUIRE(count);
  if (ids == nullptr && capacity > 0) return fail(QCS_ERR_INVALID_ARGUMENT, "ids is null");
  return guarded([&] {
    const auto topo = scenario->value.topology();
    const auto all = topo.ids();
    *count = all.size();
    for (std::size_t i = 0; i < all.size() && i < capacity; ++i) ids[i] = all[i].value;
  });
}

qcs_status qcs_scenario_base(const qcs_scenario* scenario, uint16_t* base) {
  QCS_REQUIRE(scenario);
  QCS_REQUIRE(base);
  return guarded([&] { *base = scenario->value.topology().base().value; });
}

qcs_status qcs_sim_create(const qcs_scenario* scenario, qcs_sim** out) {
  QCS_REQUIRE(scenario);
  QCS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new qcs_sim(scenario->value); });
}

void qcs_sim_free(qcs_sim* sim) { delete sim; }

qcs_status qcs_sim_step(qcs_sim* sim) {
  QCS_REQUIRE(sim);
  return guarded([&] { sim->value.step(); });
}

qcs_status qcs_sim_run(qcs_sim* sim) {
  QCS_REQUIRE(sim);
  return guarded([&] { sim->value.run(); });
}

qcs_status qcs_sim_run_until_quiet(qcs_sim* sim) {
  QCS_REQUIRE(sim);
  return guarded([&] { sim->value.run_until_quiet(); });
}

qcs_status qcs_sim_now(const qcs_sim* sim, uint32_t* tick) {
  QCS_REQUIRE(sim);
  QCS_REQUIRE(tick);
  *tick = sim->value.now();
  return QCS_OK;
}

qcs_status qcs_sim_write_outputs(const qcs_sim* sim, const char* dir, const char* label) {
  QCS_REQUIRE(sim);
  QCS_REQUIRE(dir);
  return guarded([&] { qcs::write_outputs(dir, label != nullptr ? label : "run", sim->value); });
}

qcs_status qcs_sim_summary(const qcs_sim* sim, char* buffer, size_t capacity, size_t* needed) {
  QCS_REQUIRE(sim);
  if (buffer == nullptr && capacity > 0) return fail(QCS_ERR_INVALID_ARGUMENT, "buffer is null");
  return guarded([&] {
    std::ostringstream out;
    qcs::write_summary(out, sim->value);
    const auto text = out.str();
    if (needed != nullptr) *needed = text.size();
    if (capacity > 0) copy_message(buffer, capacity, text);
  });
}

qcs_status qcs_sim_base(const qcs_sim* sim, qcs_base_info* info) {
  QCS_REQUIRE(sim);
  QCS_REQUIRE(info);
  const auto& b = sim->value.base_record();
  *info = qcs_base_info{};
  info->id = b.id.value;
  info->energy_infinite = qcs::is_infinite(b.energy) ? 1 : 0;
  info->energy = b.energy;
  info->x = b.loc.x;
  info->y = b.loc.y;
  info->flag1 = b.flags.flag1 ? 1 : 0;
  info->flag2 = b.flags.flag2 ? 1 : 0;
  info->mode = qcs::mode_char(b.mode);
  copy_message(info->msg, sizeof info->msg, b.msg);
  info->inbox_count = sim->value.trace().base_inbox.size();
  return QCS_OK;
}

qcs_status qcs_sim_node(const qcs_sim* sim, uint16_t id, qcs_node_info* info) {
  QCS_REQUIRE(sim);
  QCS_REQUIRE(info);
  return guarded([&] {
    const auto& n = sim->value.node(node_id(id));
    *info = qcs_node_info{n.id.value, qcs::mode_char(n.mode), n.flags.flag1 ? 1 : 0, n.flags.flag2 ? 1 : 0,
                          n.energy,   n.alive ? 1 : 0,        n.base ? 1 : 0};
  });
}

qcs_status qcs_batch_run(const qcs_scenario* scenario, const uint16_t* sources, size_t count, qcs_batch** out) {
  QCS_REQUIRE(scenario);
  QCS_REQUIRE(out);
  if (sources == nullptr && count > 0) return fail(QCS_ERR_INVALID_ARGUMENT, "sources is null");
  *out = nullptr;
  return guarded([&] {
    std::vector<qcs::NodeId> ids;
    for (std::size_t i = 0; i < count; ++i) ids.push_back(node_id(sources[i]));
    auto runs = qcs::run_sweep(scenario->value, ids);
    *out = new qcs_batch{scenario->value.topology(), std::move(runs)};
  });
}

void qcs_batch_free(qcs_batch* batch) { delete batch; }

qcs_status qcs_batch_write_outputs(const qcs_batch* batch, const char* dir) {
  QCS_REQUIRE(batch);
  QCS_REQUIRE(dir);
  return guarded([&] { qcs::write_sweep_outputs(dir, batch->runs, batch->topology); });
}

qcs_status qcs_batch_size(const qcs_batch* batch, size_t* count) {
  QCS_REQUIRE(batch);
  QCS_REQUIRE(count);
  *count = batch->runs.size();
  return QCS_OK;
}

qcs_status qcs_batch_path_row(const qcs_batch* batch, size_t index, qcs_path_row* row) {
  QCS_REQUIRE(batch);
  QCS_REQUIRE(row);
  if (index >= batch->runs.size()) return fail(QCS_ERR_INVALID_ARGUMENT, "run index out of range");
  const auto& run = batch->runs[index];
  for (const auto& inc : run.trace.incidents) {
    if (inc.origin != run.source) continue;
    *row = qcs_path_row{run.source.value, static_cast<uint32_t>(inc.path.size()),
                        qcs::count_comparisons(inc.replies_per_hop()), inc.delivered ? 1 : 0};
    return QCS_OK;
  }
  return fail(QCS_ERR_CONTRACT, "run has no incident for its source");
}

qcs_status qcs_pick_random_sources(const qcs_scenario* scenario, uint64_t seed, size_t k, uint16_t* out) {
  QCS_REQUIRE(scenario);
  if (out == nullptr && k > 0) return fail(QCS_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    const auto picked = qcs::pick_random_sources(scenario->value.topology(), seed, k);
    for (std::size_t i = 0; i < picked.size(); ++i) out[i] = picked[i].value;
  });
}

qcs_status qcs_lifetime(double energy, double e1, double ep, int64_t* ticks) {
  QCS_REQUIRE(ticks);
  return guarded([&] { *ticks = qcs::lifetime(energy, e1, ep); });
}

qcs_status qcs_joules(size_t packet_bytes, double* millijoules) {
  QCS_REQUIRE(millijoules);
  return guarded([&] { *millijoules = qcs::joules(packet_bytes); });
}

qcs_status qcs_send_time_ms(size_t packet_bytes, double* ms) {
  QCS_REQUIRE(ms);
  return guarded([&] { *ms = qcs::send_time_ms(packet_bytes); });
}

qcs_status qcs_s_mode_cost(size_t replies, int64_t* units) {
  QCS_REQUIRE(units);
  return guarded([&] { *units = qcs::s_mode_cost(replies); });
}

qcs_status qcs_packet_encode(const qcs_packet* packet, uint8_t* buffer, size_t capacity, size_t* written) {
  QCS_REQUIRE(packet);
  QCS_REQUIRE(buffer);
  return guarded([&] {
    if (packet->kind < QCS_QUERY || packet->kind > QCS_SOURCE) {
      throw qcs::Error(qcs::ErrorCode::InvalidArgument, "unknown packet kind");
    }
    qcs::Packet p;
    p.header.kind = static_cast<qcs::PacketKind>(packet->kind);
    p.header.flags = qcs::Flags{packet->flag1 != 0, packet->flag2 != 0};
    p.header.src = node_id(packet->src);
    p.header.hop_count = packet->hop_count;
    p.body.loc = qcs::Position{packet->x, packet->y};
    p.body.energy = packet->energy;
    p.body.message.assign(packet->message, strnlen(packet->message, sizeof packet->message));
    const auto bytes = qcs::encode(p);
    if (bytes.size() > capacity) {
      throw qcs::Error(qcs::ErrorCode::Capacity,
                       "buffer holds " + std::to_string(capacity) + " bytes, packet needs " + std::to_string(bytes.size()));
    }
    std::memcpy(buffer, bytes.data(), bytes.size());
    if (written != nullptr) *written = bytes.size();
  });
}

qcs_status qcs_packet_decode(const uint8_t* buffer, size_t length, qcs_packet* packet) {
  QCS_REQUIRE(buffer);
  QCS_REQUIRE(packet);
  return guarded([&] {
    const auto p = qcs::decode(std::span<const std::uint8_t>(buffer, length));
    *packet = qcs_packet{};
    packet->kind = static_cast<qcs_packet_kind>(p.header.kind);
    packet->flag1 = p.header.flags.flag1 ? 1 : 0;
    packet->flag2 = p.header.flags.flag2 ? 1 : 0;
    packet->src = p.header.src.value;
    packet->hop_count = p.header.hop_count;
    packet->x = p.body.loc.x;
    packet->y = p.body.loc.y;
    packet->energy = p.body.energy;
    copy_message(packet->message, sizeof packet->message, p.body.message);
  });
}

}  // extern "C"
