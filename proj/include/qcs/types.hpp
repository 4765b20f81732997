#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>

namespace qcs {

/// Node identifier. Ids start at 1; the wire format carries them in one byte,
/// so a topology holds at most 255 nodes.
struct NodeId {
  std::uint16_t value{0};

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint16_t v) : value(v) {}

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr std::uint16_t kMaxNodeId = 255;

/// Planar position in field units.
struct Position {
  double x{0.0};
  double y{0.0};

  friend constexpr bool operator==(const Position&, const Position&) = default;
};

/// One time period T.
using Tick = std::uint32_t;

/// Abstract energy units. The base station holds kInfiniteEnergy.
using Units = std::int64_t;
inline constexpr Units kInfiniteEnergy = std::numeric_limits<Units>::max();

inline constexpr bool is_infinite(Units e) { return e == kInfiniteEnergy; }

enum class Mode : std::uint8_t { Q, C, S };

constexpr char mode_char(Mode m) {
  switch (m) {
    case Mode::Q: return 'Q';
    case Mode::C: return 'C';
    case Mode::S: return 'S';
  }
  return '?';
}

/// Header flag pair. flag2 implies flag1.
struct Flags {
  bool flag1{false};
  bool flag2{false};

  constexpr bool valid() const { return flag1 || !flag2; }
  constexpr bool clear() const { return !flag1 && !flag2; }

  friend constexpr bool operator==(const Flags&, const Flags&) = default;
};

inline constexpr Flags kRegular{false, false};
inline constexpr Flags kIrregular{true, false};
inline constexpr Flags kDevastating{true, true};

}  // namespace qcs

template <>
struct std::hash<qcs::NodeId> {
  std::size_t operator()(qcs::NodeId id) const noexcept { return std::hash<std::uint16_t>{}(id.value); }
};
