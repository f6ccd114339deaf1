#include "brsim/frame.hpp"

#include <type_traits>

namespace brsim {
namespace {

class Writer {
 public:
  explicit Writer(std::size_t size) { bytes_.reserve(size); }

  void u16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void id(NodeId n) { u16(n.value); }
  void rssi(Rssi r) { u16(static_cast<std::uint16_t>(r.dbm)); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint16_t u16() {
    auto v = static_cast<std::uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  NodeId id() { return NodeId{u16()}; }
  Rssi rssi() { return Rssi{static_cast<std::int16_t>(u16())}; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::SrcBcast: return "TYPE_SRCBCAST";
    case MessageType::DstBcast: return "TYPE_DSTBCAST";
    case MessageType::Response: return "TYPE_RESPONSE";
    case MessageType::Routing: return "TYPE_ROUTING";
    case MessageType::Ack: return "TYPE_ACK";
  }
  return "TYPE_UNKNOWN";
}

MessageType type_of(const Frame& frame) {
  return static_cast<MessageType>(frame.index() + 1);
}

std::size_t encoded_length(MessageType type) {
  switch (type) {
    case MessageType::SrcBcast:
    case MessageType::DstBcast:
    case MessageType::Ack:
      return 4;
    case MessageType::Response:
      return 8;
    case MessageType::Routing:
      return 14;
  }
  return 0;
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  const MessageType type = type_of(frame);
  Writer w(encoded_length(type));
  w.u16(static_cast<std::uint16_t>(type));
  std::visit(
      [&w](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SrcBcast> || std::is_same_v<T, DstBcast>) {
          w.id(f.broadcast_node);
        } else if constexpr (std::is_same_v<T, Response>) {
          w.id(f.broadcast_node);
          w.id(f.response_node);
          w.rssi(f.dst_rssi);
        } else if constexpr (std::is_same_v<T, Routing>) {
          w.id(f.source_node);
          w.id(f.dest_node);
          w.id(f.send_node);
          w.id(f.recv_node);
          w.u32(f.hop_count);
        } else {
          w.id(f.response_node);
        }
      },
      frame);
  return w.take();
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) {
    throw FrameError(FrameError::Kind::TruncatedFrame, "frame shorter than the type field");
  }
  const auto code = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
  if (code < 1 || code > 5) {
    throw FrameError(FrameError::Kind::UnknownType, "unknown message type code");
  }
  const auto type = static_cast<MessageType>(code);
  const std::size_t expected = encoded_length(type);
  if (bytes.size() < expected) {
    throw FrameError(FrameError::Kind::TruncatedFrame, "frame shorter than its type's length");
  }
  if (bytes.size() > expected) {
    throw FrameError(FrameError::Kind::TrailingBytes, "trailing bytes after frame");
  }

  Reader r(bytes);
  switch (type) {
    case MessageType::SrcBcast:
      return SrcBcast{r.id()};
    case MessageType::DstBcast:
      return DstBcast{r.id()};
    case MessageType::Response: {
      Response f;
      f.broadcast_node = r.id();
      f.response_node = r.id();
      f.dst_rssi = r.rssi();
      return f;
    }
    case MessageType::Routing: {
      Routing f;
      f.source_node = r.id();
      f.dest_node = r.id();
      f.send_node = r.id();
      f.recv_node = r.id();
      f.hop_count = r.u32();
      return f;
    }
    case MessageType::Ack:
      return Ack{r.id()};
  }
  throw FrameError(FrameError::Kind::UnknownType, "unknown message type code");
}

}  // namespace brsim
