#pragma once

#include <vector>

#include "brsim/baseline.hpp"
#include "network.hpp"

namespace brsim::detail {

/// Random Basketball Routing: per-epoch relay coin, jittered Responses from
/// listeners, strongest reported beacon wins.
class BrNetwork final : public Network {
 public:
  BrNetwork(const Scenario& scenario, std::uint64_t seed, std::ostream* trace);

 private:
  RelayNodeState& state_at(std::size_t index) override { return nodes_[index]; }
  void start() override;
  void on_epoch(NodeId node) override;
  void on_packet_queued(NodeId /*node*/) override {}
  void on_rts(NodeId rx, const SrcBcast& rts) override;
  NodeId choose_next_hop(NodeId node, const PacketMeta& head) override;
  void on_link_idle(NodeId /*node*/) override {}
  void send(NodeId tx, Frame frame, NodeId addressee, std::optional<PacketMeta> packet,
            std::uint32_t attempt) override;
  void on_protocol_timer(const Event& event) override;

  BrNodeState& br_state(NodeId id);
  void schedule_epoch(NodeId node, SimTime at);

  std::vector<BrNodeState> nodes_;
};

/// Baseline: every node that has heard a beacon answers an RTS, the sender
/// picks the loudest responder closer to the destination, and every frame
/// except Acks and beacons goes through unslotted CSMA/CA.
class AodvNetwork final : public Network {
 public:
  AodvNetwork(const Scenario& scenario, std::uint64_t seed, std::ostream* trace);

 private:
  RelayNodeState& state_at(std::size_t index) override { return nodes_[index]; }
  void on_packet_queued(NodeId node) override;
  void on_rts(NodeId rx, const SrcBcast& rts) override;
  NodeId choose_next_hop(NodeId node, const PacketMeta& head) override;
  void on_link_idle(NodeId node) override;
  void send(NodeId tx, Frame frame, NodeId addressee, std::optional<PacketMeta> packet,
            std::uint32_t attempt) override;
  void on_protocol_timer(const Event& event) override;

  AodvNodeState& mac_state(NodeId id) { return nodes_[channel_.index_of(id)]; }
  void mac_next(NodeId node);
  void schedule_backoff(NodeId node);
  void on_cca_done(NodeId node);

  std::vector<AodvNodeState> nodes_;
};

}  // namespace brsim::detail
