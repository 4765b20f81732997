#include "qcs/packet.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qcs/error.hpp"
#include "qcs/node.hpp"
#include "qcs/topology.hpp"

namespace qcs {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

std::uint16_t coord_to_wire(double v, const char* axis) {
  const double scaled = std::round(v * static_cast<double>(kCoordScale));
  if (!(scaled >= 0.0 && scaled <= 65535.0)) {
    throw Error(ErrorCode::Capacity, fmt::format("{} coordinate {} outside wire range [0, {}]", axis, v, kMaxCoordinate));
  }
  return static_cast<std::uint16_t>(scaled);
}

// Whole units keep the longest message (5-digit id, 4-digit coordinates)
// within the 52-byte Source body; the exact position travels in the body.
std::string format_coord(double v) { return fmt::format("{}", std::llround(v)); }

}  // namespace

const char* kind_name(PacketKind kind) {
  switch (kind) {
    case PacketKind::Query: return "Query";
    case PacketKind::Ack: return "Ack";
    case PacketKind::Source: return "Source";
  }
  return "?";
}

std::vector<std::uint8_t> encode(const Packet& packet) {
  const auto& h = packet.header;
  const auto& b = packet.body;
  if (!h.flags.valid()) {
    throw Error(ErrorCode::Validation, "flag2 set without flag1");
  }
  if (h.src.value > kMaxNodeId) {
    throw Error(ErrorCode::Capacity, fmt::format("src id {} does not fit the header", h.src.value));
  }
  const auto capacity = message_capacity(h.kind);
  if (b.message.size() > capacity) {
    throw Error(ErrorCode::Capacity, fmt::format("{}-byte message exceeds {} body capacity of {} bytes",
                                                 b.message.size(), kind_name(h.kind), capacity));
  }
  if (b.message.find('\0') != std::string::npos) {
    throw Error(ErrorCode::Capacity, "message contains a NUL byte");
  }
  std::uint32_t energy = kWireInfiniteEnergy;
  if (!is_infinite(b.energy)) {
    if (b.energy < 0 || b.energy >= static_cast<Units>(kWireInfiniteEnergy)) {
      throw Error(ErrorCode::Capacity, fmt::format("energy {} outside wire range", b.energy));
    }
    energy = static_cast<std::uint32_t>(b.energy);
  }

  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(h.kind));
  const auto tag = static_cast<std::uint8_t>((kWireVersion << 4) | (static_cast<std::uint8_t>(h.kind) << 2) |
                                             (h.flags.flag1 ? 0x2 : 0) | (h.flags.flag2 ? 0x1 : 0));
  out.push_back(tag);
  out.push_back(static_cast<std::uint8_t>(h.src.value));
  out.push_back(h.hop_count);
  out.push_back(0);

  put_u16(out, coord_to_wire(b.loc.x, "x"));
  put_u16(out, coord_to_wire(b.loc.y, "y"));
  put_u32(out, energy);
  out.insert(out.end(), b.message.begin(), b.message.end());
  out.resize(encoded_size(h.kind), 0);
  return out;
}

PacketHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::Parse, fmt::format("{} bytes is shorter than the packet header", bytes.size()));
  }
  const std::uint8_t tag = bytes[0];
  if ((tag >> 4) != kWireVersion) {
    throw Error(ErrorCode::Parse, fmt::format("unsupported wire version {}", tag >> 4));
  }
  const std::uint8_t kind = (tag >> 2) & 0x3;
  if (kind > static_cast<std::uint8_t>(PacketKind::Source)) {
    throw Error(ErrorCode::Parse, fmt::format("unknown packet kind tag {}", kind));
  }
  PacketHeader h;
  h.kind = static_cast<PacketKind>(kind);
  h.flags = Flags{(tag & 0x2) != 0, (tag & 0x1) != 0};
  if (!h.flags.valid()) {
    throw Error(ErrorCode::Parse, "flag2 set without flag1");
  }
  h.src = NodeId{bytes[1]};
  h.hop_count = bytes[2];
  if (bytes[3] != 0) {
    throw Error(ErrorCode::Parse, "reserved header byte is not zero");
  }
  return h;
}

Packet decode(std::span<const std::uint8_t> bytes) {
  Packet p;
  p.header = decode_header(bytes);
  const auto expected = encoded_size(p.header.kind);
  if (bytes.size() != expected) {
    throw Error(ErrorCode::Parse, fmt::format("{} packet must be {} bytes, got {}", kind_name(p.header.kind),
                                              expected, bytes.size()));
  }
  const std::size_t at = kHeaderSize;
  p.body.loc.x = static_cast<double>(get_u16(bytes, at)) / kCoordScale;
  p.body.loc.y = static_cast<double>(get_u16(bytes, at + 2)) / kCoordScale;
  const std::uint32_t energy = get_u32(bytes, at + 4);
  p.body.energy = energy == kWireInfiniteEnergy ? kInfiniteEnergy : static_cast<Units>(energy);

  const auto text = bytes.subspan(at + kBodyFixedFields);
  std::size_t len = 0;
  while (len < text.size() && text[len] != 0) ++len;
  for (std::size_t i = len; i < text.size(); ++i) {
    if (text[i] != 0) throw Error(ErrorCode::Parse, "message padding is not zero");
  }
  p.body.message.assign(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(len));
  return p;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) out += fmt::format("{:02x}", b);
  return out;
}

Packet make_query(const NodeState& src) {
  return Packet{{PacketKind::Query, src.flags, src.id, 0}, {src.pos, src.energy, {}}};
}

Packet make_ack(const NodeState& src, bool reset) {
  return Packet{{PacketKind::Ack, src.flags, src.id, 0},
                {src.pos, src.energy, reset ? std::string(kResetMessage) : std::string{}}};
}

Packet make_source(const NodeState& src, std::string message) {
  Packet p{{PacketKind::Source, src.flags, src.id, 0}, {src.pos, src.energy, std::move(message)}};
  if (p.body.message.size() > message_capacity(PacketKind::Source)) {
    throw Error(ErrorCode::Capacity, fmt::format("{}-byte message exceeds Source body capacity of {} bytes",
                                                 p.body.message.size(), message_capacity(PacketKind::Source)));
  }
  return p;
}

std::string affected_message(NodeId id, Position pos) {
  return fmt::format("Affected NODE is ->NODE{} At Location ({} {})", id.value, format_coord(pos.x),
                     format_coord(pos.y));
}

std::string disconnected_message(NodeId id) { return fmt::format("NODE {} DISCONNECTED", id.value); }

}  // namespace qcs
