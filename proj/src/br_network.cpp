#include "protocols.hpp"

#include <vector>

namespace brsim::detail {

BrNetwork::BrNetwork(const Scenario& scenario, std::uint64_t seed, std::ostream* trace)
    : Network(scenario, Protocol::Br, seed, trace) {
  for (NodeId id : channel_.node_ids()) {
    BrNodeState st;
    st.id = id;
    nodes_.push_back(std::move(st));
  }
}

BrNodeState& BrNetwork::br_state(NodeId id) { return nodes_[channel_.index_of(id)]; }

void BrNetwork::start() {
  // Epoch clocks are unsynchronized: each node starts at its own offset.
  for (NodeId id : channel_.node_ids()) {
    if (id == destination()) continue;
    schedule_epoch(id, SimTime{engine_.draw_uniform(id, scenario_.br.epoch_ms)});
  }
}

void BrNetwork::schedule_epoch(NodeId node, SimTime at) {
  Event e;
  e.time = at;
  e.kind = EventKind::DecisionEpoch;
  e.node = node;
  engine_.schedule(e);
}

void BrNetwork::on_epoch(NodeId node) {
  BrNodeState& st = br_state(node);
  const Mode mode = decision_epoch(st, scenario_.br, engine_);
  ++metrics_.counters.decision_epochs;
  if (mode == Mode::Listening) ++metrics_.counters.listening_epochs;
  if (mode == Mode::Transmitting && st.phase == Phase::Idle && engine_.now() >= st.backoff_until) {
    start_handshake(node);
  }
  schedule_epoch(node, engine_.now() + SimTime{scenario_.br.epoch_ms});
}

void BrNetwork::on_rts(NodeId rx, const SrcBcast& rts) {
  if (rx != destination()) {
    const BrNodeState& st = br_state(rx);
    if (st.mode != Mode::Listening || !st.dst_rssi) return;
  }
  const SimTime jitter{engine_.draw_uniform(rx, scenario_.br.response_slot_bound) *
                       std::uint64_t{scenario_.br.slot_ms}};
  schedule_timer(rx, TimerTag::ResponseJitter, engine_.now() + jitter, 0, rts.broadcast_node);
}

void BrNetwork::on_protocol_timer(const Event& event) {
  if (event.tag != TimerTag::ResponseJitter) return;
  send_now(event.node, Response{event.peer, event.node, reported_dst_rssi(event.node)}, event.peer);
}

NodeId BrNetwork::choose_next_hop(NodeId node, const PacketMeta& head) {
  BrNodeState& st = br_state(node);
  std::set<NodeId> candidates;
  for (const auto& r : st.response_buffer) candidates.insert(r.frame.response_node);
  const std::set<NodeId> allowed = loop_filter(st, head, candidates, scenario_.br.loop_threshold);
  metrics_.counters.loop_filter_exclusions += candidates.size() - allowed.size();

  std::vector<Response> kept;
  for (const auto& r : st.response_buffer) {
    if (allowed.contains(r.frame.response_node)) kept.push_back(r.frame);
  }
  const ForwardTarget target = select_forwarder(st.dst_rssi, kept);
  return target.kind == ForwardTarget::Kind::Pass ? target.relay : destination();
}

void BrNetwork::send(NodeId tx, Frame frame, NodeId addressee, std::optional<PacketMeta> packet,
                     std::uint32_t attempt) {
  send_now(tx, std::move(frame), addressee, std::move(packet), attempt);
}

}  // namespace brsim::detail
