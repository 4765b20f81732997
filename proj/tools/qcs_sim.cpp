// qcs_sim: command-line front end over the C API.
//
//   qcs_sim run      --scenario FILE --out DIR [--seed N] [--loss P] [--horizon T] [--sweep ID,...] [--runs K]
//   qcs_sim sweep    --scenario FILE --out DIR [--sources ID,...] [--runs K] [--seed N]
//   qcs_sim lifetime --energy E [--e1 U] [--ep U]
//
// QCS_SIM_LOG selects the log level (trace, debug, info, warn, error, off).

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcs_sim.h"

namespace {

struct Failure {
  int code;
};

void check(qcs_status status, const char* what) {
  if (status != QCS_OK) {
    std::fprintf(stderr, "qcs_sim: %s failed (%s): %s\n", what, qcs_status_name(status), qcs_last_error());
    throw Failure{2};
  }
}

using ScenarioPtr = std::unique_ptr<qcs_scenario, decltype(&qcs_scenario_free)>;
using SimPtr = std::unique_ptr<qcs_sim, decltype(&qcs_sim_free)>;
using BatchPtr = std::unique_ptr<qcs_batch, decltype(&qcs_batch_free)>;

struct ScenarioOptions {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> loss;
  std::optional<std::uint32_t> horizon;
};

ScenarioPtr load(const ScenarioOptions& o) {
  qcs_scenario* raw = nullptr;
  check(qcs_scenario_load_file(o.scenario.c_str(), &raw), "loading scenario");
  ScenarioPtr s(raw, &qcs_scenario_free);
  if (o.seed) check(qcs_scenario_set_seed(s.get(), *o.seed), "setting seed");
  if (o.loss) check(qcs_scenario_set_loss(s.get(), *o.loss), "setting loss probability");
  if (o.horizon) check(qcs_scenario_set_horizon(s.get(), *o.horizon), "setting horizon");
  return s;
}

std::vector<std::uint16_t> random_sources(const qcs_scenario* s, std::uint64_t seed, std::size_t k) {
  std::vector<std::uint16_t> ids(k);
  check(qcs_pick_random_sources(s, seed, k, ids.data()), "picking sources");
  return ids;
}

void print_sweep(const qcs_batch* batch) {
  std::size_t n = 0;
  check(qcs_batch_size(batch, &n), "reading sweep");
  std::printf("source,path_nodes,comparisons,delivered\n");
  for (std::size_t i = 0; i < n; ++i) {
    qcs_path_row row{};
    check(qcs_batch_path_row(batch, i, &row), "reading sweep row");
    std::printf("%u,%u,%llu,%d\n", row.source, row.path_nodes, static_cast<unsigned long long>(row.comparisons),
                row.delivered);
  }
}

int sweep(const qcs_scenario* s, const std::vector<std::uint16_t>& sources, const std::string& out) {
  qcs_batch* raw = nullptr;
  check(qcs_batch_run(s, sources.data(), sources.size(), &raw), "running sweep");
  BatchPtr batch(raw, &qcs_batch_free);
  check(qcs_batch_write_outputs(batch.get(), out.c_str()), "writing outputs");
  print_sweep(batch.get());
  return 0;
}

int single_run(const qcs_scenario* s, const std::string& out) {
  qcs_sim* raw = nullptr;
  check(qcs_sim_create(s, &raw), "creating simulation");
  SimPtr sim(raw, &qcs_sim_free);
  check(qcs_sim_run(sim.get()), "running simulation");
  check(qcs_sim_write_outputs(sim.get(), out.c_str(), "run"), "writing outputs");
  std::size_t needed = 0;
  check(qcs_sim_summary(sim.get(), nullptr, 0, &needed), "building summary");
  std::string text(needed + 1, '\0');
  check(qcs_sim_summary(sim.get(), text.data(), text.size(), &needed), "building summary");
  text.resize(needed);
  std::fputs(text.c_str(), stdout);
  return 0;
}

void add_scenario_options(CLI::App* cmd, ScenarioOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario file")->required();
  cmd->add_option("--out", o.out, "Output directory")->required();
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--loss", o.loss, "Per-receiver packet loss probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--horizon", o.horizon, "Ticks to simulate")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modified QCS wireless sensor network simulator"};
  app.require_subcommand(1);

  ScenarioOptions run_opts;
  std::vector<std::uint16_t> run_sweep_ids;
  std::size_t run_random = 0;
  auto* run = app.add_subcommand("run", "Run a scenario and write trace, CSV reports and summary");
  add_scenario_options(run, run_opts);
  auto* sweep_flag =
      run->add_option("--sweep", run_sweep_ids, "Instead of the scenario events, one irregular incident per node")
          ->delimiter(',');
  run->add_option("--runs", run_random, "Sweep this many randomly chosen source nodes")->excludes(sweep_flag);

  ScenarioOptions sweep_opts;
  std::vector<std::uint16_t> sweep_ids;
  std::size_t sweep_random = 0;
  auto* sw = app.add_subcommand("sweep", "One irregular incident per source node on fresh state");
  add_scenario_options(sw, sweep_opts);
  auto* sources_opt = sw->add_option("--sources", sweep_ids, "Source node ids")->delimiter(',');
  sw->add_option("--runs", sweep_random, "Pick this many random sources")->excludes(sources_opt);

  double energy = 0, e1 = 1, ep = 0;
  auto* lt = app.add_subcommand("lifetime", "Theoretical lifetime L = E / (e1 + ep)");
  lt->add_option("--energy", energy, "Initial energy (units)")->required();
  lt->add_option("--e1", e1, "Unit cost of a 24-byte packet event");
  lt->add_option("--ep", ep, "Processing cost per period");

  CLI11_PARSE(app, argc, argv);

  try {
    check(qcs_set_log_level(std::getenv("QCS_SIM_LOG")), "configuring logging");

    if (run->parsed()) {
      auto s = load(run_opts);
      if (run_random > 0) {
        const auto seed = run_opts.seed.value_or(1);
        return sweep(s.get(), random_sources(s.get(), seed, run_random), run_opts.out);
      }
      if (!run_sweep_ids.empty()) return sweep(s.get(), run_sweep_ids, run_opts.out);
      return single_run(s.get(), run_opts.out);
    }
    if (sw->parsed()) {
      auto s = load(sweep_opts);
      std::vector<std::uint16_t> ids = sweep_ids;
      if (sweep_random > 0) {
        ids = random_sources(s.get(), sweep_opts.seed.value_or(1), sweep_random);
      } else if (ids.empty()) {
        std::size_t n = 0;
        uint16_t base = 0;
        check(qcs_scenario_node_ids(s.get(), nullptr, 0, &n), "listing nodes");
        std::vector<std::uint16_t> all(n);
        check(qcs_scenario_node_ids(s.get(), all.data(), all.size(), &n), "listing nodes");
        check(qcs_scenario_base(s.get(), &base), "finding base");
        for (auto id : all) {
          if (id != base) ids.push_back(id);
        }
      }
      return sweep(s.get(), ids, sweep_opts.out);
    }
    if (lt->parsed()) {
      std::int64_t ticks = 0;
      check(qcs_lifetime(energy, e1, ep, &ticks), "computing lifetime");
      double mj24 = 0, mj64 = 0;
      check(qcs_joules(24, &mj24), "joule model");
      check(qcs_joules(64, &mj64), "joule model");
      std::printf("lifetime: %lld ticks (E=%g, e1=%g, ep=%g)\n", static_cast<long long>(ticks), energy, e1, ep);
      std::printf("radio energy per packet: 24 B = %.4f mJ (20 ms), 64 B = %.4f mJ (40 ms)\n", mj24, mj64);
      std::printf("regular-period radio energy over lifetime: %.4f J (one 24 B packet per tick)\n",
                  static_cast<double>(ticks) * mj24 / 1000.0);
      return 0;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 1;
}
