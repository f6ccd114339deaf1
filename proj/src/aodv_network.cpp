#include "protocols.hpp"

namespace brsim::detail {

AodvNetwork::AodvNetwork(const Scenario& scenario, std::uint64_t seed, std::ostream* trace)
    : Network(scenario, Protocol::Aodv, seed, trace) {
  for (NodeId id : channel_.node_ids()) {
    AodvNodeState st;
    st.id = id;
    nodes_.push_back(std::move(st));
  }
}

void AodvNetwork::on_packet_queued(NodeId node) {
  if (state(node).phase == Phase::Idle) start_handshake(node);
}

void AodvNetwork::on_link_idle(NodeId node) { start_handshake(node); }

void AodvNetwork::on_rts(NodeId rx, const SrcBcast& rts) {
  if (rx != destination() && !state(rx).dst_rssi) return;
  send(rx, Response{rts.broadcast_node, rx, reported_dst_rssi(rx)}, rts.broadcast_node, std::nullopt, 0);
}

NodeId AodvNetwork::choose_next_hop(NodeId node, const PacketMeta& /*head*/) {
  const AodvNodeState& st = mac_state(node);
  return aodv_select_next(st.dst_rssi, st.response_buffer).value_or(destination());
}

void AodvNetwork::send(NodeId tx, Frame frame, NodeId addressee, std::optional<PacketMeta> packet,
                       std::uint32_t attempt) {
  if (std::holds_alternative<Ack>(frame) || std::holds_alternative<DstBcast>(frame)) {
    send_now(tx, std::move(frame), addressee, std::move(packet), attempt);
    return;
  }
  mac_state(tx).mac_queue.push_back(QueuedFrame{std::move(frame), addressee, std::move(packet), attempt});
  mac_next(tx);
}

void AodvNetwork::mac_next(NodeId node) {
  AodvNodeState& st = mac_state(node);
  if (st.csma || st.mac_queue.empty()) return;
  st.csma.emplace(scenario_.csma);
  schedule_backoff(node);
}

void AodvNetwork::schedule_backoff(NodeId node) {
  AodvNodeState& st = mac_state(node);
  const std::uint64_t slots = engine_.draw_uniform(node, st.csma->backoff_window());
  schedule_timer(node, TimerTag::CsmaBackoff, engine_.now() + SimTime{slots * scenario_.csma.slot_ms}, 0);
}

void AodvNetwork::on_protocol_timer(const Event& event) {
  AodvNodeState& st = mac_state(event.node);
  if (event.tag == TimerTag::CsmaBackoff) {
    st.cca_started = engine_.now();
    schedule_timer(event.node, TimerTag::CsmaCca, engine_.now() + SimTime{scenario_.csma.cca_ms}, 0);
  } else if (event.tag == TimerTag::CsmaCca) {
    on_cca_done(event.node);
  }
}

void AodvNetwork::on_cca_done(NodeId node) {
  AodvNodeState& st = mac_state(node);
  const bool busy = medium_.busy_for(node, st.cca_started, engine_.now());
  switch (st.csma->on_cca(busy)) {
    case CsmaAttempt::Verdict::Retry:
      schedule_backoff(node);
      return;
    case CsmaAttempt::Verdict::Transmit: {
      QueuedFrame qf = std::move(st.mac_queue.front());
      st.mac_queue.pop_front();
      st.csma.reset();
      send_now(node, std::move(qf.frame), qf.addressee, std::move(qf.packet), qf.attempt);
      break;
    }
    case CsmaAttempt::Verdict::ChannelAccessFailure: {
      QueuedFrame qf = std::move(st.mac_queue.front());
      st.mac_queue.pop_front();
      st.csma.reset();
      ++metrics_.counters.channel_access_failures;
      const bool rts = std::holds_alternative<SrcBcast>(qf.frame) && st.phase == Phase::AwaitResponses;
      const bool data = std::holds_alternative<Routing>(qf.frame) && st.phase == Phase::AwaitAck;
      if (rts || data) abandon_head(node, DropReason::ChannelAccess);
      break;
    }
  }
  mac_next(node);
}

}  // namespace brsim::detail
