#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcs/types.hpp"

namespace qcs {

struct NodeState;

enum class PacketKind : std::uint8_t { Query = 0, Ack = 1, Source = 2 };

const char* kind_name(PacketKind kind);

// Wire layout, big-endian throughout.
//
//   header (4 bytes)
//     byte 0  high nibble: format version (1)
//             low nibble:  kind (2 bits) | flag1 | flag2
//     byte 1  src node id
//     byte 2  hop count
//     byte 3  reserved, zero
//   body (20 bytes for Query/Ack, 60 for Source)
//     x, y    u16 each, fixed point at 1/64 field unit
//     energy  u32, 0xFFFFFFFF for the base station's unbounded supply
//     message NUL-padded text filling the rest of the body
inline constexpr std::size_t kHeaderSize = 4;
inline constexpr std::size_t kShortBodySize = 20;
inline constexpr std::size_t kLongBodySize = 60;
inline constexpr std::size_t kBodyFixedFields = 8;
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::uint32_t kWireInfiniteEnergy = 0xFFFFFFFFu;

inline constexpr std::string_view kResetMessage = "RESET";

struct PacketHeader {
  PacketKind kind{PacketKind::Query};
  Flags flags{};
  NodeId src{};
  std::uint8_t hop_count{0};

  friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

struct PacketBody {
  Position loc{};
  Units energy{0};
  std::string message;

  friend bool operator==(const PacketBody&, const PacketBody&) = default;
};

struct Packet {
  PacketHeader header;
  PacketBody body;

  friend bool operator==(const Packet&, const Packet&) = default;
};

constexpr std::size_t body_size(PacketKind kind) {
  return kind == PacketKind::Source ? kLongBodySize : kShortBodySize;
}
constexpr std::size_t encoded_size(PacketKind kind) { return kHeaderSize + body_size(kind); }
constexpr std::size_t message_capacity(PacketKind kind) { return body_size(kind) - kBodyFixedFields; }

/// Throws Error(Capacity) when the message does not fit or a field is out of
/// its wire range; Error(Validation) on flag2 without flag1.
std::vector<std::uint8_t> encode(const Packet& packet);

/// Reads only the first kHeaderSize bytes.
PacketHeader decode_header(std::span<const std::uint8_t> bytes);

Packet decode(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

Packet make_query(const NodeState& src);
Packet make_ack(const NodeState& src, bool reset);
Packet make_source(const NodeState& src, std::string message);

/// "Affected NODE is ->NODE<k> At Location (<x> <y>)", coordinates rounded to
/// whole units.
std::string affected_message(NodeId id, Position pos);
/// "NODE <k> DISCONNECTED".
std::string disconnected_message(NodeId id);

}  // namespace qcs
