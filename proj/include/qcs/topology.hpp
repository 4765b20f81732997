#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qcs/types.hpp"

namespace qcs {

/// Coordinates are held internally as fixed point at 1/64 field unit, the same
/// resolution the packet body uses. Squared distances are then exact integers
/// and the range test has no rounding ambiguity at the boundary.
inline constexpr std::int64_t kCoordScale = 64;
inline constexpr double kMaxCoordinate = 65535.0 / kCoordScale;

std::int64_t to_fixed(double v);

struct Field {
  double width{0.0};
  double height{0.0};
};

struct NodePlacement {
  NodeId id;
  Position pos;
  bool base{false};
};

class Topology {
 public:
  /// Validates placements: distinct ids in [1, 255], exactly one base,
  /// positions inside the field, radio_range > 0.
  Topology(Field field, double radio_range, std::vector<NodePlacement> nodes);

  std::size_t size() const { return ids_.size(); }
  NodeId base() const { return base_; }
  Field field() const { return field_; }
  double radio_range() const { return static_cast<double>(range_fixed_) / kCoordScale; }

  /// Ascending.
  const std::vector<NodeId>& ids() const { return ids_; }
  bool contains(NodeId id) const { return index_.contains(id); }

  Position position(NodeId id) const;
  bool is_base(NodeId id) const { return id == base_; }

  /// { j != i : dist(i, j) <= radio_range }, ascending id.
  std::span<const NodeId> neighbors(NodeId id) const;
  bool adjacent(NodeId a, NodeId b) const;

  double dist(NodeId a, NodeId b) const;
  /// Squared distance in fixed-point units (exact).
  std::int64_t dist2_fixed(NodeId a, NodeId b) const;

  bool connected() const;

 private:
  std::size_t index_of(NodeId id) const;

  Field field_;
  std::int64_t range_fixed_{0};
  NodeId base_{};
  std::vector<NodeId> ids_;
  std::vector<std::int64_t> fx_;
  std::vector<std::int64_t> fy_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::unordered_map<NodeId, std::size_t> index_;
};

/// Parses the [field] and [nodes] sections of a scenario text. Other sections
/// are ignored. At least two nodes are required.
Topology load_layout(std::string_view source);

}  // namespace qcs
