/* C interface to the QCS sensor-network simulator.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Every fallible call returns a qcs_status; on failure qcs_last_error()
 * describes the most recent error on the calling thread.
 */
#ifndef QCS_SIM_H
#define QCS_SIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(QCS_BUILDING_LIBRARY)
#define QCS_API __attribute__((visibility("default")))
#else
#define QCS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qcs_status {
  QCS_OK = 0,
  QCS_ERR_INVALID_ARGUMENT = 1,
  QCS_ERR_PARSE = 2,
  QCS_ERR_VALIDATION = 3,
  QCS_ERR_IO = 4,
  QCS_ERR_UNKNOWN_NODE = 5,
  QCS_ERR_CAPACITY = 6,
  QCS_ERR_DOMAIN = 7,
  QCS_ERR_CONTRACT = 8,
  QCS_ERR_INTERNAL = 9
} qcs_status;

typedef struct qcs_scenario qcs_scenario;
typedef struct qcs_sim qcs_sim;
typedef struct qcs_batch qcs_batch;

QCS_API const char* qcs_status_name(qcs_status status);
/* Message for the last failure on this thread; "" if none. */
QCS_API const char* qcs_last_error(void);

/* Log level name as accepted by spdlog ("trace" ... "off"); NULL or "" keeps
 * the default ("warn"). */
QCS_API qcs_status qcs_set_log_level(const char* level);

/* ---- scenarios ---- */

QCS_API qcs_status qcs_scenario_load_file(const char* path, qcs_scenario** out);
QCS_API qcs_status qcs_scenario_parse(const char* text, qcs_scenario** out);
QCS_API void qcs_scenario_free(qcs_scenario* scenario);

QCS_API qcs_status qcs_scenario_set_seed(qcs_scenario* scenario, uint64_t seed);
QCS_API qcs_status qcs_scenario_set_loss(qcs_scenario* scenario, double loss_prob);
QCS_API qcs_status qcs_scenario_set_horizon(qcs_scenario* scenario, uint32_t horizon);
QCS_API qcs_status qcs_scenario_add_event(qcs_scenario* scenario, uint32_t tick, uint16_t node, double reading);

QCS_API qcs_status qcs_scenario_node_count(const qcs_scenario* scenario, size_t* count);
/* Writes up to `capacity` ids in ascending order; *count receives the total. */
QCS_API qcs_status qcs_scenario_node_ids(const qcs_scenario* scenario, uint16_t* ids, size_t capacity,
                                         size_t* count);
QCS_API qcs_status qcs_scenario_base(const qcs_scenario* scenario, uint16_t* base);

/* ---- single runs ---- */

QCS_API qcs_status qcs_sim_create(const qcs_scenario* scenario, qcs_sim** out);
QCS_API void qcs_sim_free(qcs_sim* sim);

QCS_API qcs_status qcs_sim_step(qcs_sim* sim);
/* Runs to the horizon. */
QCS_API qcs_status qcs_sim_run(qcs_sim* sim);
/* Runs until no incident is open and no node is a source, or the horizon. */
QCS_API qcs_status qcs_sim_run_until_quiet(qcs_sim* sim);
QCS_API qcs_status qcs_sim_now(const qcs_sim* sim, uint32_t* tick);

/* trace.txt, ledger.csv, energy_diff.csv, path_comparisons.csv, summary.txt */
QCS_API qcs_status qcs_sim_write_outputs(const qcs_sim* sim, const char* dir, const char* label);

/* Copies the summary text (NUL-terminated, truncated to capacity).
 * *needed receives the full length excluding the terminator. */
QCS_API qcs_status qcs_sim_summary(const qcs_sim* sim, char* buffer, size_t capacity, size_t* needed);

typedef struct qcs_base_info {
  uint16_t id;
  int energy_infinite;
  int64_t energy;
  double x;
  double y;
  int flag1;
  int flag2;
  char mode; /* 'Q', 'C' or 'S' */
  char msg[64];
  size_t inbox_count;
} qcs_base_info;

QCS_API qcs_status qcs_sim_base(const qcs_sim* sim, qcs_base_info* info);

typedef struct qcs_node_info {
  uint16_t id;
  char mode;
  int flag1;
  int flag2;
  int64_t energy;
  int alive;
  int is_base;
} qcs_node_info;

QCS_API qcs_status qcs_sim_node(const qcs_sim* sim, uint16_t id, qcs_node_info* info);

/* ---- sweeps: one irregular incident per source on fresh state ---- */

QCS_API qcs_status qcs_batch_run(const qcs_scenario* scenario, const uint16_t* sources, size_t count,
                                 qcs_batch** out);
QCS_API void qcs_batch_free(qcs_batch* batch);
QCS_API qcs_status qcs_batch_write_outputs(const qcs_batch* batch, const char* dir);
QCS_API qcs_status qcs_batch_size(const qcs_batch* batch, size_t* count);

typedef struct qcs_path_row {
  uint16_t source;
  uint32_t path_nodes;
  uint64_t comparisons;
  int delivered;
} qcs_path_row;

/* The swept incident of run `index`. */
QCS_API qcs_status qcs_batch_path_row(const qcs_batch* batch, size_t index, qcs_path_row* row);

/* k distinct non-base node ids chosen from the seed. */
QCS_API qcs_status qcs_pick_random_sources(const qcs_scenario* scenario, uint64_t seed, size_t k, uint16_t* out);

/* ---- analytic formulas ---- */

QCS_API qcs_status qcs_lifetime(double energy, double e1, double ep, int64_t* ticks);
/* Millijoules to send a 24- or 64-byte packet. */
QCS_API qcs_status qcs_joules(size_t packet_bytes, double* millijoules);
QCS_API qcs_status qcs_send_time_ms(size_t packet_bytes, double* ms);
/* Units one irregular hop costs its sender, default costs. */
QCS_API qcs_status qcs_s_mode_cost(size_t replies, int64_t* units);

/* ---- packet codec ---- */

typedef enum qcs_packet_kind { QCS_QUERY = 0, QCS_ACK = 1, QCS_SOURCE = 2 } qcs_packet_kind;

#define QCS_MAX_MESSAGE 52

typedef struct qcs_packet {
  qcs_packet_kind kind;
  int flag1;
  int flag2;
  uint16_t src;
  uint8_t hop_count;
  double x;
  double y;
  int64_t energy; /* INT64_MAX for the base station */
  char message[QCS_MAX_MESSAGE + 1];
} qcs_packet;

QCS_API qcs_status qcs_packet_encode(const qcs_packet* packet, uint8_t* buffer, size_t capacity, size_t* written);
QCS_API qcs_status qcs_packet_decode(const uint8_t* buffer, size_t length, qcs_packet* packet);

#ifdef __cplusplus
}
#endif

#endif /* QCS_SIM_H */
