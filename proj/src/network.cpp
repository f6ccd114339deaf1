#include "network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace brsim::detail {
namespace {

Rssi clamp_rssi(double dbm) {
  const double r = std::round(dbm);
  const double lo = std::numeric_limits<std::int16_t>::min();
  const double hi = std::numeric_limits<std::int16_t>::max();
  return Rssi{static_cast<std::int16_t>(std::clamp(r, lo, hi))};
}

}  // namespace

Network::Network(const Scenario& scenario, Protocol protocol, std::uint64_t seed, std::ostream* trace)
    : scenario_(scenario),
      protocol_(protocol),
      engine_(seed),
      channel_(scenario.topology, scenario.channel),
      medium_(channel_, engine_),
      beacon_boost_db_(scenario.channel.beacon_boost_db()) {
  engine_.set_trace(trace);
  metrics_.protocol = std::string(to_string(protocol));
  metrics_.node_count = channel_.node_count();
  metrics_.seed = seed;
  metrics_.relay_probability = scenario.br.relay_probability;
}

RunMetrics Network::run() {
  Event beacon;
  beacon.kind = EventKind::BeaconTick;
  beacon.node = destination();
  engine_.schedule(beacon);

  const TrafficSpec& traffic = scenario_.traffic;
  for (NodeId source : traffic.sources) {
    for (std::uint32_t k = 0; k < traffic.packets_per_source; ++k) {
      schedule_timer(source, TimerTag::PacketGenerate, traffic.start + k * traffic.inter_arrival, 0);
    }
  }
  start();

  engine_.run_until(scenario_.horizon, [this](const Event& e) { handle(e); });

  for (auto& p : metrics_.packets) {
    if (p.status != PacketStatus::Pending) continue;
    p.status = PacketStatus::Dropped;
    p.reason = DropReason::Horizon;
    p.finished = scenario_.horizon;
  }
  return std::move(metrics_);
}

void Network::schedule_timer(NodeId node, TimerTag tag, SimTime at, std::uint64_t token, NodeId peer) {
  Event e;
  e.time = at;
  e.kind = EventKind::TimerFire;
  e.node = node;
  e.peer = peer;
  e.tag = tag;
  e.token = token;
  engine_.schedule(std::move(e));
}

void Network::handle(const Event& event) {
  switch (event.kind) {
    case EventKind::BeaconTick: {
      send_now(destination(), DstBcast{destination()}, kBroadcast);
      Event next;
      next.time = engine_.now() + SimTime{scenario_.br.bcast_ms};
      next.kind = EventKind::BeaconTick;
      next.node = destination();
      engine_.schedule(next);
      break;
    }
    case EventKind::DecisionEpoch:
      on_epoch(event.node);
      break;
    case EventKind::FrameArrival:
      on_arrival(event);
      break;
    case EventKind::TimerFire: {
      if (event.tag == TimerTag::PacketGenerate) {
        generate_packet(event.node);
        break;
      }
      RelayNodeState& st = state(event.node);
      const bool current = event.token == st.timer_generation;
      switch (event.tag) {
        case TimerTag::ResponseWait:
          if (current && st.phase == Phase::AwaitResponses) on_response_wait(event.node);
          break;
        case TimerTag::AckWait:
          if (current && st.phase == Phase::AwaitAck) on_ack_timeout(event.node);
          break;
        case TimerTag::BackoffDone:
          if (current && st.phase == Phase::Backoff) {
            st.phase = Phase::Idle;
            start_handshake(event.node);
          }
          break;
        default:
          on_protocol_timer(event);
          break;
      }
      break;
    }
  }
}

void Network::generate_packet(NodeId source) {
  const std::uint64_t uid = metrics_.packets.size();
  PacketOutcome outcome;
  outcome.uid = uid;
  outcome.source = source;
  outcome.generated = engine_.now();
  metrics_.packets.push_back(outcome);
  book_.push_back(PacketBook{1, DropReason::None});

  PacketMeta packet;
  packet.uid = uid;
  packet.source = source;
  packet.dest = destination();
  packet.route.push_back(source);
  state(source).tx_queue.push_back(std::move(packet));
  on_packet_queued(source);
}

const Transmission& Network::send_now(NodeId tx, Frame frame, NodeId addressee, std::optional<PacketMeta> packet,
                                      std::uint32_t attempt) {
  const double offset = std::holds_alternative<DstBcast>(frame) ? beacon_boost_db_ : 0.0;
  const Transmission& t = medium_.transmit(tx, std::move(frame), addressee, offset, std::move(packet), attempt);
  transmitted(t);
  return t;
}

void Network::transmitted(const Transmission& t) {
  if (t.tx == destination()) return;
  RelayNodeState& st = state(t.tx);
  if (std::holds_alternative<SrcBcast>(t.frame) && st.phase == Phase::AwaitResponses) {
    schedule_timer(t.tx, TimerTag::ResponseWait, t.start + SimTime{scenario_.br.response_wait_ms},
                   st.timer_generation);
  } else if (std::holds_alternative<Routing>(t.frame) && st.phase == Phase::AwaitAck) {
    schedule_timer(t.tx, TimerTag::AckWait, t.start + SimTime{scenario_.br.ack_wait_ms}, st.timer_generation);
  }
}

void Network::start_handshake(NodeId node) {
  RelayNodeState& st = state(node);
  if (st.tx_queue.empty()) return;
  st.phase = Phase::AwaitResponses;
  st.response_buffer.clear();
  ++st.timer_generation;
  send(node, SrcBcast{node}, kBroadcast, std::nullopt, 0);
}

void Network::on_response_wait(NodeId node) {
  RelayNodeState& st = state(node);
  const PacketMeta& head = st.tx_queue.front();
  const NodeId next = choose_next_hop(node, head);
  st.response_buffer.clear();
  st.phase = Phase::AwaitAck;
  st.pending_target = next;
  ++st.timer_generation;

  ++metrics_.counters.routing_frames;
  if (next == destination()) ++metrics_.counters.direct_shots;
  else ++metrics_.counters.relay_forwardings;

  const Routing frame{head.source, head.dest, node, next, head.hop_count};
  send(node, frame, next, head, st.attempt_count + 1);
}

void Network::on_ack_timeout(NodeId node) {
  RelayNodeState& st = state(node);
  const BackoffDecision d = beb_backoff(st, scenario_.br, engine_);
  if (d.drop) {
    abandon_head(node, DropReason::RetryLimit);
    return;
  }
  st.phase = Phase::Backoff;
  ++st.timer_generation;
  schedule_timer(node, TimerTag::BackoffDone, st.backoff_until, st.timer_generation);
}

void Network::abandon_head(NodeId node, DropReason reason) {
  RelayNodeState& st = state(node);
  const std::uint64_t uid = st.tx_queue.front().uid;
  st.tx_queue.pop_front();
  st.attempt_count = 0;
  st.phase = Phase::Idle;
  ++st.timer_generation;
  book_[uid].last_reason = reason;
  release_copy(uid);
  on_link_idle(node);
}

void Network::release_copy(std::uint64_t uid) {
  PacketBook& b = book_[uid];
  --b.live_copies;
  PacketOutcome& p = metrics_.packets[uid];
  if (b.live_copies == 0 && p.status == PacketStatus::Pending) {
    p.status = PacketStatus::Dropped;
    p.reason = b.last_reason;
    p.finished = engine_.now();
  }
}

Rssi Network::reported_dst_rssi(NodeId node) {
  const ChannelParams& cp = channel_.params();
  if (node == destination()) {
    // The destination's own beacon, measured at zero distance.
    return clamp_rssi(cp.tx_power_dbm + beacon_boost_db_ - cp.ref_loss_db);
  }
  const RelayNodeState& st = state(node);
  const auto it = scenario_.report_offset_db.find(node);
  const double offset = it == scenario_.report_offset_db.end() ? 0.0 : it->second;
  return clamp_rssi(st.dst_rssi->dbm + offset);
}

void Network::on_arrival(const Event& event) {
  const Transmission& t = medium_.at(event.token);
  const NodeId rx = event.node;
  const bool ok = medium_.received(t.id, rx);

  if (const auto* r = std::get_if<Routing>(&t.frame)) {
    HopRecord hop;
    hop.packet_uid = t.packet->uid;
    hop.from = t.tx;
    hop.to = rx;
    hop.time = engine_.now();
    hop.distance_m = channel_.distance(t.tx, rx);
    hop.success = ok;
    hop.attempts = t.attempt;
    hop.hop_count = r->hop_count;
    metrics_.record_hop(hop);
    if (ok && r->recv_node == rx) on_routing(rx, *r, t);
    return;
  }
  if (!ok) return;

  if (std::holds_alternative<DstBcast>(t.frame)) {
    if (rx != destination()) on_dst_beacon(state(rx), channel_.rssi(t.tx, rx, t.power_offset_db));
  } else if (const auto* rts = std::get_if<SrcBcast>(&t.frame)) {
    on_rts(rx, *rts);
  } else if (const auto* resp = std::get_if<Response>(&t.frame)) {
    if (rx == destination() || resp->broadcast_node != rx) return;
    RelayNodeState& st = state(rx);
    if (st.phase == Phase::AwaitResponses) {
      st.response_buffer.push_back(ResponseRecord{*resp, channel_.rssi(t.tx, rx, t.power_offset_db)});
    }
  } else if (const auto* ack = std::get_if<Ack>(&t.frame)) {
    if (rx == destination()) return;
    RelayNodeState& st = state(rx);
    if (st.phase != Phase::AwaitAck || ack->response_node != st.pending_target) return;
    const std::uint64_t uid = st.tx_queue.front().uid;
    st.tx_queue.pop_front();
    st.attempt_count = 0;
    st.phase = Phase::Idle;
    ++st.timer_generation;
    release_copy(uid);
    on_link_idle(rx);
  }
}

void Network::on_routing(NodeId rx, const Routing& frame, const Transmission& t) {
  send_now(rx, Ack{rx}, frame.send_node);

  const PacketMeta& incoming = *t.packet;
  const std::uint64_t uid = incoming.uid;

  if (rx == destination()) {
    PacketOutcome& p = metrics_.packets[uid];
    if (p.status != PacketStatus::Pending) {
      ++metrics_.counters.duplicate_receptions;
      return;
    }
    p.status = PacketStatus::Delivered;
    p.hops = frame.hop_count + 1;
    p.finished = engine_.now();
    p.route = incoming.route;
    p.route.push_back(rx);
    return;
  }

  RelayNodeState& st = state(rx);
  st.prior_forwarders[uid].insert(frame.send_node);
  const bool holding = std::any_of(st.tx_queue.begin(), st.tx_queue.end(),
                                   [uid](const PacketMeta& p) { return p.uid == uid; });
  if (holding) {
    ++metrics_.counters.duplicate_receptions;
    return;
  }

  PacketMeta copy = incoming;
  copy.hop_count = frame.hop_count + 1;
  copy.route.push_back(rx);
  if (copy.hop_count >= scenario_.br.hard_hop_cap) {
    book_[uid].last_reason = DropReason::HopCap;
    return;
  }
  ++book_[uid].live_copies;
  st.tx_queue.push_back(std::move(copy));
  on_packet_queued(rx);
}

}  // namespace brsim::detail
