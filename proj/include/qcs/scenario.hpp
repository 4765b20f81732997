#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qcs/energy.hpp"
#include "qcs/node.hpp"
#include "qcs/topology.hpp"

namespace qcs {

// Scenario files are line-oriented text with bracketed sections:
//
//   [field]       width, height, radio_range (key = value)
//   [nodes]       rows: id x y [base]
//   [costs]       e1, e2, ep, threshold, init_min, init_max, isolation_multiplier
//   [thresholds]  irregular, devastating
//   [sim]         seed, horizon, loss_prob, neighbor_timeout
//   [events]      rows: tick node reading
//
// '#' starts a comment. Only [field] and [nodes] are required.

struct SectionLine {
  int number{0};
  std::string text;
};

using SectionDoc = std::map<std::string, std::vector<SectionLine>>;

SectionDoc parse_sections(std::string_view text);

struct Layout {
  Field field{};
  double radio_range{110.0};
  std::vector<NodePlacement> nodes;
};

Layout layout_from_sections(const SectionDoc& doc);

struct SenseEvent {
  Tick tick{0};
  NodeId node{};
  double reading{0.0};
};

struct SimParams {
  std::uint64_t seed{1};
  Tick horizon{40};
  double loss_prob{0.0};
  /// A learned neighbor unheard for longer than this many ticks is dropped.
  /// 0 selects 2 x node count, long enough to sit out a flood and its reset.
  Tick neighbor_timeout{0};
};

struct Scenario {
  Layout layout;
  CostModel costs;
  Thresholds thresholds;
  SimParams sim;
  std::vector<SenseEvent> events;

  Topology topology() const;

  /// Cross-field checks: horizon >= 1, loss_prob in [0, 1], events reference
  /// existing nodes before the horizon, topology invariants.
  void validate() const;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

}  // namespace qcs
