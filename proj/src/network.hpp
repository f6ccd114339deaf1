#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "brsim/br_node.hpp"
#include "brsim/channel.hpp"
#include "brsim/engine.hpp"
#include "brsim/medium.hpp"
#include "brsim/metrics.hpp"
#include "brsim/scenario.hpp"
#include "brsim/simulation.hpp"

namespace brsim::detail {

/// Machinery both protocols share: beacons, traffic generation, the
/// Routing/Ack exchange with its ACK timer and BEB retransmission, packet
/// accounting. Subclasses decide who answers an RTS, which responder gets
/// the packet, when a handshake starts, and how frames reach the air.
class Network {
 public:
  Network(const Scenario& scenario, Protocol protocol, std::uint64_t seed, std::ostream* trace);
  virtual ~Network() = default;

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  RunMetrics run();

 protected:
  virtual RelayNodeState& state_at(std::size_t index) = 0;
  virtual void start() {}
  virtual void on_epoch(NodeId /*node*/) {}
  virtual void on_packet_queued(NodeId node) = 0;
  virtual void on_rts(NodeId rx, const SrcBcast& rts) = 0;
  virtual NodeId choose_next_hop(NodeId node, const PacketMeta& head) = 0;
  /// The head packet left the node (acknowledged or dropped).
  virtual void on_link_idle(NodeId node) = 0;
  /// Hands a frame to the MAC. Implementations call transmitted() once the
  /// frame is on the air.
  virtual void send(NodeId tx, Frame frame, NodeId addressee, std::optional<PacketMeta> packet,
                    std::uint32_t attempt) = 0;
  virtual void on_protocol_timer(const Event& /*event*/) {}

  RelayNodeState& state(NodeId id) { return state_at(channel_.index_of(id)); }
  NodeId destination() const { return channel_.topology().destination; }

  void start_handshake(NodeId node);
  /// Puts a frame on the air immediately (no carrier sensing).
  const Transmission& send_now(NodeId tx, Frame frame, NodeId addressee,
                               std::optional<PacketMeta> packet = std::nullopt, std::uint32_t attempt = 0);
  void transmitted(const Transmission& t);
  void abandon_head(NodeId node, DropReason reason);
  /// Beacon strength a node puts in its Responses.
  Rssi reported_dst_rssi(NodeId node);
  void schedule_timer(NodeId node, TimerTag tag, SimTime at, std::uint64_t token, NodeId peer = {});

  const Scenario& scenario_;
  Protocol protocol_;
  Engine engine_;
  Channel channel_;
  Medium medium_;
  RunMetrics metrics_;

 private:
  struct PacketBook {
    int live_copies = 0;
    DropReason last_reason = DropReason::None;
  };

  void handle(const Event& event);
  void on_arrival(const Event& event);
  void on_routing(NodeId rx, const Routing& frame, const Transmission& t);
  void on_response_wait(NodeId node);
  void on_ack_timeout(NodeId node);
  void generate_packet(NodeId source);
  void release_copy(std::uint64_t uid);

  std::vector<PacketBook> book_;
  double beacon_boost_db_;
};

}  // namespace brsim::detail
