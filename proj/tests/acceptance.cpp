// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qcs/batch.hpp"
#include "qcs/energy.hpp"
#include "qcs/engine.hpp"
#include "qcs/metrics.hpp"
#include "qcs/packet.hpp"
#include "qcs_sim.h"
#include "support.hpp"

using namespace qcs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok{true};
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

int g_failures = 0;

void criterion(int number, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0 && secs > budget_s) out.fail(fmt::format("took {:.2f} s, budget {:.0f} s", secs, budget_s));
  if (!out.ok) ++g_failures;
  std::printf("criterion %2d: %s  %s (%.2f s)%s%s\n", number, out.ok ? "PASS" : "FAIL", title, secs,
              out.detail.empty() ? "" : " -- ", out.detail.c_str());
  std::fflush(stdout);
}

std::string ids(const std::set<NodeId>& s) {
  std::string out;
  for (NodeId id : s) out += (out.empty() ? "" : ",") + std::to_string(id.value);
  return "{" + out + "}";
}

// ---- criterion 6 machinery, reused by 9 ----

// Checks ticks [from, to) of a finished run against the regular-period rules:
// only Query packets, one per node that started the tick in Q; every node
// alternates Q/C; every node's tick debit is e1 x (own query + Q neighbors heard).
void regular_suite(const Simulation& sim, Tick from, Tick to, Outcome& out) {
  const auto& trace = sim.trace();
  const auto& layout = sim.scenario().layout;
  const auto adj = test::brute_adjacency(layout);
  const NodeId base = test::layout_base(layout);
  const Units e1 = sim.scenario().costs.e1;

  std::map<std::pair<Tick, NodeId>, const NodeTickRecord*> rec;
  for (const auto& r : trace.node_ticks) rec[{r.tick, r.node}] = &r;
  std::map<std::pair<Tick, NodeId>, Units> ledger_sum;
  for (const auto& d : trace.ledger.entries()) ledger_sum[{d.tick, d.node}] += d.amount;

  for (Tick t = from; t < to; ++t) {
    std::set<NodeId> q;
    for (const auto& p : layout.nodes) {
      if (p.id == base) continue;
      const auto it = rec.find({t, p.id});
      if (it == rec.end()) return out.fail(fmt::format("no record for node {} at tick {}", p.id.value, t));
      const auto& r = *it->second;
      if (r.mode == Mode::S || !r.flags.clear()) {
        return out.fail(fmt::format("node {} not regular at tick {}", p.id.value, t));
      }
      if (r.mode == Mode::Q) q.insert(p.id);
    }
    std::multiset<NodeId> senders;
    for (const auto& p : trace.packets) {
      if (p.tick != t) continue;
      if (p.packet.header.kind != PacketKind::Query || !p.packet.header.flags.clear()) {
        return out.fail(fmt::format("tick {}: {} packet from node {}", t, kind_name(p.packet.header.kind),
                                    p.packet.header.src.value));
      }
      senders.insert(p.packet.header.src);
    }
    if (std::multiset<NodeId>(q.begin(), q.end()) != senders) {
      return out.fail(fmt::format("tick {}: senders differ from Q set {}", t, ids(q)));
    }
    for (const auto& p : layout.nodes) {
      if (p.id == base) continue;
      Units expected = q.contains(p.id) ? e1 : 0;
      for (NodeId nb : adj.at(p.id)) expected += q.contains(nb) ? e1 : 0;
      const auto& r = *rec.at({t, p.id});
      if (r.debit != expected || ledger_sum[{t, p.id}] != expected) {
        return out.fail(fmt::format("tick {} node {}: debit {} (ledger {}), expected {}", t, p.id.value, r.debit,
                                    ledger_sum[{t, p.id}], expected));
      }
      if (t + 1 < to) {
        const auto& next = *rec.at({t + 1, p.id});
        if (next.mode == r.mode) return out.fail(fmt::format("node {} did not alternate at tick {}", p.id.value, t));
      }
    }
  }
}

// ---- greedy oracle for criterion 7 ----

std::optional<NodeId> oracle_choice(const HopRecord& hop, const Layout& layout, Units threshold) {
  const Position base_pos = test::layout_pos(layout, test::layout_base(layout));
  std::optional<NodeId> best;
  double best_d = 0;
  Units best_e = 0;
  for (const auto& r : hop.replies) {
    if (r.energy <= threshold) continue;
    const double d = test::dist2(test::layout_pos(layout, r.node), base_pos);
    const bool better = !best || d < best_d || (d == best_d && r.energy > best_e) ||
                        (d == best_d && r.energy == best_e && r.node < *best);
    if (better) {
      best = r.node;
      best_d = d;
      best_e = r.energy;
    }
  }
  return best;
}

Layout coarse_random_layout(std::mt19937_64& gen, std::size_t n) {
  // Lattice positions make equal distances to the base common, exercising
  // the tie-break rules.
  for (;;) {
    Layout layout;
    layout.field = Field{400, 400};
    layout.radio_range = 110;
    std::uniform_int_distribution<int> cell(0, 8);
    std::set<std::pair<int, int>> used;
    while (layout.nodes.size() < n) {
      const auto c = std::make_pair(cell(gen), cell(gen));
      if (!used.insert(c).second) continue;
      const auto id = static_cast<std::uint16_t>(layout.nodes.size() + 1);
      layout.nodes.push_back(NodePlacement{NodeId{id}, {c.first * 50.0, c.second * 50.0}, id == 1});
    }
    if (test::graph_connected(layout)) return layout;
  }
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = test::slurp(e.path().string());
  return files;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  criterion(1, "packet sizes 24/64 B and decode(encode(p)) == p over 1000+ random packets", 1.0, [] {
    Outcome out;
    NodeState n;
    n.id = NodeId{5};
    n.pos = {150, 75};
    n.energy = 3500;
    out.require(encode(make_query(n)).size() == 24, "query size");
    out.require(encode(make_ack(n, false)).size() == 24, "ack size");
    out.require(encode(make_ack(n, true)).size() == 24, "reset ack size");
    out.require(encode(make_source(n, std::string(52, 'm'))).size() == 64, "source size");
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<int> k(0, 2), f(0, 2), id(1, 255), byte(0, 255), grid(0, 65535), ch(33, 126);
    int checked = 0;
    for (int i = 0; i < 1500; ++i) {
      Packet p;
      p.header.kind = static_cast<PacketKind>(k(gen));
      const int fl = f(gen);
      p.header.flags = fl == 0 ? kRegular : fl == 1 ? kIrregular : kDevastating;
      p.header.src = NodeId{static_cast<std::uint16_t>(id(gen))};
      p.header.hop_count = static_cast<std::uint8_t>(byte(gen));
      p.body.loc = {grid(gen) / 64.0, grid(gen) / 64.0};
      p.body.energy = i % 10 == 0 ? kInfiniteEnergy : static_cast<Units>(gen() % 0xFFFFFFFFull);
      const auto len = gen() % (message_capacity(p.header.kind) + 1);
      for (std::size_t c = 0; c < len; ++c) p.body.message.push_back(static_cast<char>(ch(gen)));
      const auto bytes = encode(p);
      const std::size_t want = p.header.kind == PacketKind::Source ? 64 : 24;
      if (bytes.size() != want) return out.fail(fmt::format("packet {} encoded to {} bytes", i, bytes.size())), out;
      if (!(decode(bytes) == p)) return out.fail(fmt::format("packet {} did not round-trip", i)), out;
      ++checked;
    }
    out.detail = fmt::format("{} packets", checked);
    return out;
  });

  criterion(2, "joules(24) = 0.9724 mJ, joules(64) = 1.9448 mJ, joules(64) == 2 joules(24)", 0, [] {
    Outcome out;
    out.require(std::abs(joules(24) - 0.9724) <= 1e-9 * 0.9724, fmt::format("joules(24) = {:.12f}", joules(24)));
    out.require(std::abs(joules(64) - 1.9448) <= 1e-9 * 1.9448, fmt::format("joules(64) = {:.12f}", joules(64)));
    out.require(joules(64) == 2.0 * joules(24), "doubling law not exact");
    return out;
  });

  criterion(3, "lifetime(3000,1,0) = 3000 and lifetime(5000,1,0) = 5000", 0, [] {
    Outcome out;
    out.require(lifetime(3000, 1, 0) == 3000, "lifetime(3000,1,0)");
    out.require(lifetime(5000, 1, 0) == 5000, "lifetime(5000,1,0)");
    return out;
  });

  criterion(4, "S-mode ledger debit per irregular hop == 6 + Acks received (100 incidents)", 5.0, [] {
    Outcome out;
    const std::set<DebitCause> itemized{DebitCause::QuerySend, DebitCause::AckRecv, DebitCause::SourceSend,
                                        DebitCause::SourceHandoff, DebitCause::ResetRecv};
    std::mt19937_64 gen(4);
    std::size_t incidents = 0, hops = 0;
    const auto paper = test::paper16();
    while (incidents < 100) {
      Scenario s = incidents < 50 ? paper : test::scenario_from_layout(test::random_connected_layout(gen, 8 + gen() % 40), gen());
      s.sim.seed = gen();
      s.sim.horizon = 200;
      const auto src = pick_random_sources(s.topology(), gen(), 1).front();
      s.events = {SenseEvent{static_cast<Tick>(gen() % 3), src, 65}};
      Simulation sim(s);
      sim.run_until_quiet();
      std::map<std::pair<Tick, NodeId>, Units> spent;
      for (const auto& d : sim.trace().ledger.entries()) {
        if (itemized.contains(d.cause)) spent[{d.tick, d.node}] += d.amount;
      }
      for (const auto& inc : sim.trace().incidents) {
        ++incidents;
        if (!inc.delivered) out.fail(fmt::format("incident from node {} undelivered at zero loss", inc.origin.value));
        for (const auto& h : inc.hops) {
          if (!h.completed) continue;
          ++hops;
          const Units expected = 6 + static_cast<Units>(h.replies.size());
          const Units got = spent[{h.tick, h.node}];
          if (got != expected) {
            out.fail(fmt::format("tick {} node {}: debit {} != 6 + {}", h.tick, h.node.value, got, h.replies.size()));
          }
        }
      }
    }
    if (out.ok) out.detail = fmt::format("{} incidents, {} hops", incidents, hops);
    return out;
  });

  criterion(5, "init_modes is a maximal independent set; paper16 Q-fraction in [0.40, 0.60]", 10.0, [] {
    Outcome out;
    const auto paper = test::paper16();
    const auto topo = paper.topology();
    std::size_t lo = 1000, hi = 0;
    const std::size_t n = topo.size() - 1;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto modes = init_modes(topo, seed);
      if (!test::is_maximal_independent(paper.layout, modes)) out.fail(fmt::format("paper16 seed {} not an MIS", seed));
      const auto q = static_cast<std::size_t>(std::count_if(modes.begin(), modes.end(),
                                                            [](const auto& kv) { return kv.second == Mode::Q; }));
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      // 0.40 <= q/n <= 0.60 in integers.
      if (!(5 * q >= 2 * n && 5 * q <= 3 * n)) out.fail(fmt::format("seed {}: {} of {} nodes are Q", seed, q, n));
    }
    std::mt19937_64 gen(5);
    for (int i = 0; i < 100; ++i) {
      std::uniform_int_distribution<std::size_t> size(2, 64);
      const auto layout = test::random_connected_layout(gen, size(gen));
      const Topology t(layout.field, layout.radio_range, layout.nodes);
      if (!test::is_maximal_independent(layout, init_modes(t, gen()))) {
        out.fail(fmt::format("random topology {} ({} nodes) not an MIS", i, layout.nodes.size()));
      }
    }
    if (out.ok) out.detail = fmt::format("paper16 Q count {}..{} of {}", lo, hi, n);
    return out;
  });

  criterion(6, "20-tick regular run: only Queries (one per Q node), Q/C alternation, debits e1 x (1 + Q receipts)",
            0, [] {
              Outcome out;
              for (std::uint64_t seed : {1, 2, 3, 17, 99}) {
                auto s = test::paper16();
                s.sim.seed = seed;
                s.sim.horizon = 20;
                Simulation sim(s);
                sim.run();
                regular_suite(sim, 0, 20, out);
                if (!out.ok) {
                  out.detail = fmt::format("seed {}: {}", seed, out.detail);
                  break;
                }
              }
              return out;
            });

  criterion(7, "greedy next hop matches a brute-force argmin oracle with tie-breaks (200 incidents)", 30.0, [] {
    Outcome out;
    std::mt19937_64 gen(7);
    std::size_t incidents = 0, hops = 0, ties = 0, dead_ends = 0;
    const auto paper = test::paper16();
    while (incidents < 200) {
      const int flavor = static_cast<int>(incidents % 3);
      Scenario s = flavor == 0   ? paper
                   : flavor == 1 ? test::scenario_from_layout(test::random_connected_layout(gen, 10 + gen() % 40), 0)
                                 : test::scenario_from_layout(coarse_random_layout(gen, 12 + gen() % 30), 0);
      s.sim.seed = gen();
      s.sim.horizon = 150;
      s.sim.loss_prob = (gen() % 4 == 0) ? 0.15 : 0.0;
      const auto picks = pick_random_sources(s.topology(), gen(), std::min<std::size_t>(3, s.topology().size() - 1));
      s.events.clear();
      for (std::size_t i = 0; i < picks.size(); ++i) s.events.push_back(SenseEvent{static_cast<Tick>(i * 2), picks[i], 60});
      Simulation sim(s);
      sim.run_until_quiet();
      const Position base_pos = test::layout_pos(s.layout, test::layout_base(s.layout));
      for (const auto& inc : sim.trace().incidents) {
        ++incidents;
        for (const auto& h : inc.hops) {
          ++hops;
          const auto want = oracle_choice(h, s.layout, s.costs.threshold);
          if (want != h.chosen) {
            out.fail(fmt::format("incident {} hop at node {} tick {}: engine {}, oracle {}", inc.id, h.node.value,
                                 h.tick, h.chosen ? std::to_string(h.chosen->value) : "-",
                                 want ? std::to_string(want->value) : "-"));
          }
          if (!want) ++dead_ends;
          std::set<double> d;
          std::size_t eligible = 0;
          for (const auto& r : h.replies) {
            if (r.energy <= s.costs.threshold) continue;
            ++eligible;
            d.insert(test::dist2(test::layout_pos(s.layout, r.node), base_pos));
          }
          if (d.size() < eligible) ++ties;
        }
      }
    }
    if (out.ok) {
      out.detail = fmt::format("{} incidents, {} hops, {} with distance ties, {} dead ends", incidents, hops, ties,
                               dead_ends);
    }
    return out;
  });

  criterion(8, "comparisons monotone in path length; ratio in [1, 8], median near 3", 0, [] {
    Outcome out;
    const auto s = test::paper16();
    const auto topo = s.topology();
    std::vector<NodeId> all;
    for (NodeId id : topo.ids()) {
      if (!topo.is_base(id)) all.push_back(id);
    }
    std::vector<std::pair<std::size_t, std::uint64_t>> points;
    for (std::uint64_t seed : {1, 2, 3}) {
      auto sc = s;
      sc.sim.seed = seed;
      for (const auto& row : sweep_path_rows(run_sweep(sc, all))) {
        if (!row.delivered) return out.fail(fmt::format("node {} undelivered", row.source.value)), out;
        points.emplace_back(row.path_nodes, row.comparisons);
      }
    }
    for (const auto& [la, ca] : points) {
      for (const auto& [lb, cb] : points) {
        if (la < lb && ca > cb) out.fail(fmt::format("path {} has {} comparisons, path {} only {}", la, ca, lb, cb));
      }
    }
    std::vector<double> ratios;
    for (const auto& [l, c] : points) ratios.push_back(static_cast<double>(c) / static_cast<double>(l));
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios.size() % 2 ? ratios[ratios.size() / 2]
                                            : (ratios[ratios.size() / 2 - 1] + ratios[ratios.size() / 2]) / 2;
    out.require(ratios.front() >= 1.0 && ratios.back() <= 8.0,
                fmt::format("ratio range [{:.2f}, {:.2f}]", ratios.front(), ratios.back()));
    out.require(median >= 2.0 && median <= 4.0, fmt::format("median ratio {:.2f}", median));
    if (out.ok) {
      out.detail = fmt::format("{} incidents, ratio [{:.2f}, {:.2f}], median {:.2f}", points.size(), ratios.front(),
                               ratios.back(), median);
    }
    return out;
  });

  criterion(9, "petrol flow == hop-capped BFS per tick; base receipt at graph distance; reset leaves no S", 10.0,
            [] {
              Outcome out;
              auto check_source = [&](const Scenario& base_s, NodeId src, Tick horizon, bool expect_reset) {
                auto s = base_s;
                const Tick t0 = 1;
                s.events = {SenseEvent{t0, src, 95}};
                s.sim.horizon = horizon;
                Simulation sim(s);
                const auto depth = test::bfs_depths(s.layout, src);
                const NodeId base = test::layout_base(s.layout);
                const int cap = static_cast<int>(s.layout.nodes.size() / 2);
                const auto base_depth = depth.contains(base) ? std::optional<int>(depth.at(base)) : std::nullopt;
                const bool base_reached = base_depth && *base_depth <= cap;
                // Until the wave's first reset, the S set is the BFS ball.
                const Tick last_pure = base_reached ? t0 + static_cast<Tick>(*base_depth) : horizon - 1;
                while (sim.now() <= t0) sim.step();
                for (Tick t = t0; t <= last_pure && !sim.finished(); ++t) {
                  if (t > t0) sim.step();
                  const int radius = std::min(static_cast<int>(t - t0), cap);
                  std::set<NodeId> ball, s_set;
                  for (const auto& [id, d] : depth) {
                    if (id != base && d <= radius) ball.insert(id);
                  }
                  for (const auto& n : sim.nodes()) {
                    if (!n.base && n.mode == Mode::S) s_set.insert(n.id);
                  }
                  if (ball != s_set) {
                    return out.fail(fmt::format("source {} tick {}: S {} vs BFS {}", src.value, t, ids(s_set), ids(ball)));
                  }
                }
                if (!expect_reset) return;
                const auto& inbox = sim.trace().base_inbox;
                if (inbox.empty()) return out.fail(fmt::format("source {}: base never received", src.value));
                if (inbox.front().tick - t0 != static_cast<Tick>(*base_depth)) {
                  return out.fail(fmt::format("source {}: base receipt after {} ticks, distance {}", src.value,
                                              inbox.front().tick - t0, *base_depth));
                }
                sim.run_until_quiet();
                for (const auto& n : sim.nodes()) {
                  if (n.mode == Mode::S || !n.flags.clear()) {
                    return out.fail(fmt::format("source {}: node {} still S after reset", src.value, n.id.value));
                  }
                }
                const Tick from = sim.now();
                while (!sim.finished()) sim.step();
                if (sim.now() < from + 20) return out.fail("horizon too short for the post-reset check");
                regular_suite(sim, from, from + 20, out);
                if (!out.ok) out.detail = fmt::format("source {} post-reset: {}", src.value, out.detail);
              };

              const auto paper = test::paper16();
              const auto topo = paper.topology();
              for (NodeId id : topo.ids()) {
                if (!topo.is_base(id)) check_source(paper, id, 80, true);
                if (!out.ok) return out;
              }
              // A line far longer than the hop cap: the flood must stop growing
              // at floor(n/2) hops and never reach the base.
              Scenario line;
              line.layout.field = Field{1000, 10};
              line.layout.radio_range = 60;
              for (std::uint16_t i = 1; i <= 13; ++i) {
                line.layout.nodes.push_back(NodePlacement{NodeId{i}, {(i - 1) * 50.0, 0}, i == 13});
              }
              check_source(line, NodeId{1}, 20, false);
              if (out.ok) out.detail = "15 paper16 sources + 13-node line (cap 6)";
              return out;
            });

  criterion(10, "node10 irregular event: base holds the exact message, energy Inf, loc [150 450], flags 1/0, mode S",
            0, [] {
              Outcome out;
              qcs_scenario* s = nullptr;
              if (qcs_scenario_load_file(test::data_path("paper16.scn").c_str(), &s) != QCS_OK) {
                return out.fail(qcs_last_error()), out;
              }
              qcs_sim* sim = nullptr;
              out.require(qcs_scenario_add_event(s, 2, 10, 65) == QCS_OK, "add event");
              out.require(qcs_sim_create(s, &sim) == QCS_OK, "create");
              out.require(sim && qcs_sim_run(sim) == QCS_OK, "run");
              qcs_base_info b{};
              out.require(sim && qcs_sim_base(sim, &b) == QCS_OK, "base");
              out.require(std::strcmp(b.msg, "Affected NODE is ->NODE10 At Location (225 225)") == 0,
                          std::string("msg '") + b.msg + "'");
              out.require(b.energy_infinite == 1, "energy not Inf");
              out.require(b.x == 150 && b.y == 450, "loc");
              out.require(b.flag1 == 1 && b.flag2 == 0, "flags");
              out.require(b.mode == 'S', "mode");
              qcs_sim_free(sim);
              qcs_scenario_free(s);
              return out;
            });

  criterion(11, "same seed twice gives byte-identical trace and CSV files", 0, [] {
    Outcome out;
    const auto root = fs::temp_directory_path() / "qcs_acceptance_determinism";
    fs::remove_all(root);
    std::vector<Scenario> scenarios;
    for (const char* f : {"paper16.scn", "node10_irregular.scn", "node10_devastating.scn"}) {
      scenarios.push_back(load_scenario_file(test::data_path(f)));
    }
    auto lossy = scenarios[1];
    lossy.sim.loss_prob = 0.3;
    scenarios.push_back(lossy);
    std::mt19937_64 gen(11);
    auto rnd = test::scenario_from_layout(test::random_connected_layout(gen, 30), 5);
    rnd.sim.loss_prob = 0.1;
    rnd.events = {SenseEvent{1, NodeId{3}, 70}, SenseEvent{4, NodeId{9}, 90}};
    scenarios.push_back(rnd);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      std::map<std::string, std::string> first;
      for (int rep = 0; rep < 2; ++rep) {
        const auto dir = root / fmt::format("s{}_{}", i, rep);
        Simulation sim(scenarios[i]);
        sim.run();
        write_outputs(dir, "run", sim);
        auto files = read_dir(dir);
        if (rep == 0) {
          first = std::move(files);
        } else if (files != first) {
          out.fail(fmt::format("scenario {} outputs differ between runs", i));
        } else {
          compared += files.size();
        }
      }
    }
    const std::vector<NodeId> src{NodeId{13}, NodeId{12}, NodeId{15}, NodeId{2}, NodeId{14}, NodeId{8}, NodeId{9}};
    write_sweep_outputs(root / "sweep0", run_sweep(scenarios[0], src), scenarios[0].topology());
    write_sweep_outputs(root / "sweep1", run_sweep(scenarios[0], src), scenarios[0].topology());
    out.require(read_dir(root / "sweep0") == read_dir(root / "sweep1"), "sweep outputs differ");
    fs::remove_all(root);
    if (out.ok) out.detail = fmt::format("{} file pairs + sweep", compared);
    return out;
  });

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
