#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "brsim/channel.hpp"
#include "brsim/engine.hpp"
#include "brsim/frame.hpp"

namespace brsim {

/// Simulation-level identity of a data packet. Never serialized.
struct PacketMeta {
  std::uint64_t uid = 0;
  NodeId source{};
  NodeId dest{};
  std::uint32_t hop_count = 0;
  std::vector<NodeId> route;  // nodes that have held this copy, in order
};

struct Transmission {
  std::uint64_t id = 0;
  NodeId tx{};
  NodeId addressee{};  // kBroadcast for broadcasts
  SimTime start{};
  SimTime end{};
  Frame frame;
  double power_offset_db = 0.0;
  std::optional<PacketMeta> packet;  // Routing frames only
  std::uint32_t attempt = 0;         // Routing frames only, 1-based
};

/// The shared radio medium of one run. Every transmission lasts
/// frame_airtime_ms; a node's transmissions never overlap each other (a new
/// one starts when the radio is free). Arrivals are scheduled at the end of
/// the transmission: broadcasts at every node able to hear them, unicasts
/// at the addressee only.
class Medium {
 public:
  Medium(const Channel& channel, Engine& engine);

  const Transmission& transmit(NodeId tx, Frame frame, NodeId addressee,
                               double power_offset_db = 0.0,
                               std::optional<PacketMeta> packet = std::nullopt,
                               std::uint32_t attempt = 0);

  const Transmission& at(std::uint64_t id) const { return log_[id]; }
  std::size_t size() const { return log_.size(); }

  /// Verdict for rx receiving transmission id: fails if rx transmitted at
  /// any time during it (half duplex) or on the channel's SIR test against
  /// every other overlapping transmission.
  bool received(std::uint64_t id, NodeId rx) const;

  /// Nodes other than the sender whose transmissions overlap transmission id.
  std::vector<Emitter> concurrent_with(std::uint64_t id) const;

  /// Clear-channel assessment: true if a transmission that listener can
  /// hear overlaps [from, to).
  bool busy_for(NodeId listener, SimTime from, SimTime to) const;

  SimTime airtime() const { return airtime_; }

 private:
  template <class Fn>
  void for_each_overlapping(SimTime from, SimTime to, Fn&& fn) const;

  const Channel& channel_;
  Engine& engine_;
  SimTime airtime_;
  std::deque<Transmission> log_;  // deque: references stay valid as it grows
  std::vector<SimTime> radio_free_at_;  // by dense node index
  SimTime max_deferral_{0};
};

}  // namespace brsim
