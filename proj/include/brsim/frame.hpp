#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

namespace brsim {

/// 16-bit node address. 0xFFFF is reserved for broadcast and is never
/// assigned to a node.
struct NodeId {
  static constexpr std::uint16_t kBroadcastValue = 0xFFFF;

  std::uint16_t value{0};

  constexpr bool is_broadcast() const { return value == kBroadcastValue; }
  constexpr auto operator<=>(const NodeId&) const = default;
};

inline constexpr NodeId kBroadcast{NodeId::kBroadcastValue};

/// Received signal strength in whole dBm. Larger is stronger.
struct Rssi {
  std::int16_t dbm{0};

  constexpr auto operator<=>(const Rssi&) const = default;
};

/// Wire codes follow the row order of the message-type table.
enum class MessageType : std::uint16_t {
  SrcBcast = 1,
  DstBcast = 2,
  Response = 3,
  Routing = 4,
  Ack = 5,
};

std::string_view to_string(MessageType type);

/// RTS soliciting relay candidates.
struct SrcBcast {
  NodeId broadcast_node;
  bool operator==(const SrcBcast&) const = default;
};

/// Destination beacon.
struct DstBcast {
  NodeId broadcast_node;
  bool operator==(const DstBcast&) const = default;
};

/// Relay candidate's answer to an RTS, carrying its stored beacon strength.
struct Response {
  NodeId broadcast_node;
  NodeId response_node;
  Rssi dst_rssi;
  bool operator==(const Response&) const = default;
};

/// Data frame.
struct Routing {
  NodeId source_node;
  NodeId dest_node;
  NodeId send_node;
  NodeId recv_node;
  std::uint32_t hop_count{0};
  bool operator==(const Routing&) const = default;
};

/// Acknowledgement of a Routing frame.
struct Ack {
  NodeId response_node;
  bool operator==(const Ack&) const = default;
};

// Alternative index + 1 == wire code.
using Frame = std::variant<SrcBcast, DstBcast, Response, Routing, Ack>;

MessageType type_of(const Frame& frame);

/// Fixed encoded size in bytes, including the 2-byte type field.
std::size_t encoded_length(MessageType type);

class FrameError : public std::runtime_error {
 public:
  enum class Kind { UnknownType, TruncatedFrame, TrailingBytes };

  FrameError(Kind kind, const char* what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Big-endian: 16-bit type code, then the type's fields in table order.
/// Every field is 16 bits except hop_count (32 bits); dst_rssi is two's
/// complement.
std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Throws FrameError on unknown type codes and on length mismatches.
Frame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace brsim

template <>
struct std::hash<brsim::NodeId> {
  std::size_t operator()(const brsim::NodeId& id) const noexcept { return id.value; }
};
