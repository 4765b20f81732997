// Test-side helpers and independent oracles. Nothing here calls into the
// engine's own selection or flooding code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qcs/scenario.hpp"
#include "qcs/topology.hpp"

namespace qcs::test {

inline std::string data_path(const std::string& name) { return std::string(QCS_TEST_DATA_DIR) + "/" + name; }

inline Scenario paper16() { return load_scenario_file(data_path("paper16.scn")); }

// Squared Euclidean distance straight from positions. Test layouts sit on the
// 1/64 grid, so the double arithmetic is exact.
inline double dist2(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline std::map<NodeId, std::set<NodeId>> brute_adjacency(const Layout& layout) {
  std::map<NodeId, std::set<NodeId>> adj;
  const double r2 = layout.radio_range * layout.radio_range;
  for (const auto& a : layout.nodes) {
    adj[a.id];
    for (const auto& b : layout.nodes) {
      if (a.id != b.id && dist2(a.pos, b.pos) <= r2) adj[a.id].insert(b.id);
    }
  }
  return adj;
}

inline NodeId layout_base(const Layout& layout) {
  for (const auto& p : layout.nodes) {
    if (p.base) return p.id;
  }
  return NodeId{};
}

inline Position layout_pos(const Layout& layout, NodeId id) {
  for (const auto& p : layout.nodes) {
    if (p.id == id) return p.pos;
  }
  return {};
}

// Hop distances from `from`; the base is reachable but never relays.
inline std::map<NodeId, int> bfs_depths(const Layout& layout, NodeId from) {
  const auto adj = brute_adjacency(layout);
  const NodeId base = layout_base(layout);
  std::map<NodeId, int> depth{{from, 0}};
  std::queue<NodeId> q;
  q.push(from);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    if (u == base) continue;
    for (NodeId v : adj.at(u)) {
      if (!depth.contains(v)) {
        depth[v] = depth[u] + 1;
        q.push(v);
      }
    }
  }
  return depth;
}

inline bool graph_connected(const Layout& layout) {
  const auto adj = brute_adjacency(layout);
  std::set<NodeId> seen{layout.nodes.front().id};
  std::vector<NodeId> stack{layout.nodes.front().id};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adj.at(u)) {
      if (seen.insert(v).second) stack.push_back(v);
    }
  }
  return seen.size() == layout.nodes.size();
}

// Q nodes pairwise non-adjacent, every C node has a Q neighbor.
inline bool is_maximal_independent(const Layout& layout, const std::map<NodeId, Mode>& modes) {
  const auto adj = brute_adjacency(layout);
  const NodeId base = layout_base(layout);
  for (const auto& p : layout.nodes) {
    if (p.id == base) {
      if (modes.contains(p.id)) return false;
      continue;
    }
    if (!modes.contains(p.id)) return false;
    const Mode m = modes.at(p.id);
    bool has_q = false;
    for (NodeId nb : adj.at(p.id)) {
      if (nb == base) continue;
      if (modes.at(nb) == Mode::Q) has_q = true;
    }
    if (m == Mode::Q && has_q) return false;
    if (m == Mode::C && !has_q) return false;
  }
  return true;
}

// Random connected layout on the 1/64 grid: nodes are dropped one at a time
// within range of an earlier node, so the graph is connected by construction.
inline Layout random_connected_layout(std::mt19937_64& gen, std::size_t n, double range = 110.0) {
  Layout layout;
  layout.field = Field{1000.0, 1000.0};
  layout.radio_range = range;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> base_pick(0, n - 1);
  const std::size_t base = base_pick(gen);
  auto snap = [](double v) { return std::round(v * 64.0) / 64.0; };
  while (layout.nodes.size() < n) {
    Position p;
    if (layout.nodes.empty()) {
      p = {snap(300 + 400 * unit(gen)), snap(300 + 400 * unit(gen))};
    } else {
      std::uniform_int_distribution<std::size_t> anchor_pick(0, layout.nodes.size() - 1);
      const auto anchor = layout.nodes[anchor_pick(gen)].pos;
      const double ang = 2 * M_PI * unit(gen);
      const double rad = range * 0.98 * std::sqrt(unit(gen));
      p = {snap(anchor.x + rad * std::cos(ang)), snap(anchor.y + rad * std::sin(ang))};
      if (p.x < 0 || p.y < 0 || p.x > layout.field.width || p.y > layout.field.height) continue;
      if (dist2(p, anchor) > range * range) continue;
    }
    const auto id = static_cast<std::uint16_t>(layout.nodes.size() + 1);
    layout.nodes.push_back(NodePlacement{NodeId{id}, p, layout.nodes.size() == base});
  }
  return layout;
}

inline Scenario scenario_from_layout(Layout layout, std::uint64_t seed) {
  Scenario s;
  s.layout = std::move(layout);
  s.sim.seed = seed;
  return s;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace qcs::test
