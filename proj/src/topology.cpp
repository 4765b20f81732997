#include "qcs/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <fmt/format.h>

#include "qcs/error.hpp"
#include "qcs/scenario.hpp"

namespace qcs {

std::int64_t to_fixed(double v) {
  return static_cast<std::int64_t>(std::llround(v * static_cast<double>(kCoordScale)));
}

Topology::Topology(Field field, double radio_range, std::vector<NodePlacement> nodes) : field_(field) {
  if (!(radio_range > 0.0) || !std::isfinite(radio_range)) {
    throw Error(ErrorCode::Validation, fmt::format("radio range must be positive, got {}", radio_range));
  }
  if (!(field.width > 0.0) || !(field.height > 0.0) || field.width > kMaxCoordinate ||
      field.height > kMaxCoordinate) {
    throw Error(ErrorCode::Validation,
                fmt::format("field {}x{} outside (0, {}]", field.width, field.height, kMaxCoordinate));
  }
  if (nodes.empty()) {
    throw Error(ErrorCode::Validation, "topology has no nodes");
  }
  range_fixed_ = to_fixed(radio_range);

  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  int bases = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id.value < 1 || n.id.value > kMaxNodeId) {
      throw Error(ErrorCode::Validation, fmt::format("node id {} outside [1, {}]", n.id.value, kMaxNodeId));
    }
    if (i > 0 && nodes[i - 1].id == n.id) {
      throw Error(ErrorCode::Validation, fmt::format("duplicate node id {}", n.id.value));
    }
    if (!(n.pos.x >= 0.0 && n.pos.x <= field.width && n.pos.y >= 0.0 && n.pos.y <= field.height)) {
      throw Error(ErrorCode::Validation, fmt::format("node {} at ({}, {}) outside {}x{} field", n.id.value,
                                                     n.pos.x, n.pos.y, field.width, field.height));
    }
    if (n.base) {
      ++bases;
      base_ = n.id;
    }
    index_.emplace(n.id, i);
    ids_.push_back(n.id);
    fx_.push_back(to_fixed(n.pos.x));
    fy_.push_back(to_fixed(n.pos.y));
  }
  if (bases != 1) {
    throw Error(ErrorCode::Validation, fmt::format("expected exactly one base station, found {}", bases));
  }

  const std::int64_t r2 = range_fixed_ * range_fixed_;
  adjacency_.resize(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    for (std::size_t j = 0; j < ids_.size(); ++j) {
      if (i == j) continue;
      const std::int64_t dx = fx_[i] - fx_[j];
      const std::int64_t dy = fy_[i] - fy_[j];
      if (dx * dx + dy * dy <= r2) adjacency_[i].push_back(ids_[j]);
    }
  }
}

std::size_t Topology::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownNode, fmt::format("unknown node id {}", id.value));
  }
  return it->second;
}

Position Topology::position(NodeId id) const {
  const auto i = index_of(id);
  return {static_cast<double>(fx_[i]) / kCoordScale, static_cast<double>(fy_[i]) / kCoordScale};
}

std::span<const NodeId> Topology::neighbors(NodeId id) const { return adjacency_[index_of(id)]; }

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& nb = adjacency_[index_of(a)];
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::int64_t Topology::dist2_fixed(NodeId a, NodeId b) const {
  const auto i = index_of(a);
  const auto j = index_of(b);
  const std::int64_t dx = fx_[i] - fx_[j];
  const std::int64_t dy = fy_[i] - fy_[j];
  return dx * dx + dy * dy;
}

double Topology::dist(NodeId a, NodeId b) const {
  return std::sqrt(static_cast<double>(dist2_fixed(a, b))) / kCoordScale;
}

bool Topology::connected() const {
  std::vector<bool> seen(ids_.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto i = frontier.front();
    frontier.pop();
    for (NodeId nb : adjacency_[i]) {
      const auto j = index_.at(nb);
      if (!seen[j]) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == ids_.size();
}

Topology load_layout(std::string_view source) {
  const auto doc = parse_sections(source);
  auto layout = layout_from_sections(doc);
  if (layout.nodes.size() < 2) {
    throw Error(ErrorCode::Validation, fmt::format("layout needs at least 2 nodes, found {}", layout.nodes.size()));
  }
  return Topology(layout.field, layout.radio_range, std::move(layout.nodes));
}

}  // namespace qcs
