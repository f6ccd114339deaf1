#include "brsim/medium.hpp"

#include <algorithm>

namespace brsim {

Medium::Medium(const Channel& channel, Engine& engine)
    : channel_(channel),
      engine_(engine),
      airtime_(channel.params().frame_airtime_ms),
      radio_free_at_(channel.node_count(), SimTime{0}) {}

const Transmission& Medium::transmit(NodeId tx, Frame frame, NodeId addressee, double power_offset_db,
                                     std::optional<PacketMeta> packet, std::uint32_t attempt) {
  SimTime& free_at = radio_free_at_[channel_.index_of(tx)];
  const SimTime start = std::max(engine_.now(), free_at);
  free_at = start + airtime_;
  max_deferral_ = std::max(max_deferral_, start - engine_.now());

  Transmission t;
  t.id = log_.size();
  t.tx = tx;
  t.addressee = addressee;
  t.start = start;
  t.end = start + airtime_;
  t.frame = std::move(frame);
  t.power_offset_db = power_offset_db;
  t.packet = std::move(packet);
  t.attempt = attempt;
  log_.push_back(std::move(t));
  const Transmission& rec = log_.back();

  auto arrive = [&](NodeId rx) {
    Event e;
    e.time = rec.end;
    e.kind = EventKind::FrameArrival;
    e.node = rx;
    e.peer = tx;
    e.token = rec.id;
    e.frame = rec.frame;
    engine_.schedule(std::move(e));
  };
  if (addressee.is_broadcast()) {
    for (NodeId rx : channel_.node_ids()) {
      if (rx != tx && channel_.can_hear(tx, rx, power_offset_db)) arrive(rx);
    }
  } else {
    arrive(addressee);
  }
  return rec;
}

// A record starts at most max_deferral_ after it was appended, and append
// times never decrease. So once a record starts more than
// max_deferral_ + airtime before `from`, no earlier record can overlap.
template <class Fn>
void Medium::for_each_overlapping(SimTime from, SimTime to, Fn&& fn) const {
  for (std::size_t i = log_.size(); i-- > 0;) {
    const Transmission& t = log_[i];
    if (t.start + airtime_ + max_deferral_ < from) break;
    if (t.start < to && t.end > from) fn(t);
  }
}

std::vector<Emitter> Medium::concurrent_with(std::uint64_t id) const {
  const Transmission& t = log_[id];
  std::vector<Emitter> out;
  for_each_overlapping(t.start, t.end, [&](const Transmission& u) {
    if (u.id != t.id && u.tx != t.tx) out.push_back(Emitter{u.tx, u.power_offset_db});
  });
  return out;
}

bool Medium::received(std::uint64_t id, NodeId rx) const {
  const Transmission& t = log_[id];
  if (rx == t.tx) return false;
  bool rx_busy = false;
  std::vector<Emitter> interferers;
  for_each_overlapping(t.start, t.end, [&](const Transmission& u) {
    if (u.id == t.id) return;
    if (u.tx == rx) rx_busy = true;
    else if (u.tx != t.tx) interferers.push_back(Emitter{u.tx, u.power_offset_db});
  });
  if (rx_busy) return false;
  return channel_.delivery_success(Emitter{t.tx, t.power_offset_db}, rx, interferers);
}

bool Medium::busy_for(NodeId listener, SimTime from, SimTime to) const {
  bool busy = false;
  for_each_overlapping(from, to, [&](const Transmission& u) {
    if (!busy && u.tx != listener && channel_.can_hear(u.tx, listener, u.power_offset_db)) busy = true;
  });
  return busy;
}

}  // namespace brsim
