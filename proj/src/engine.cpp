#include "brsim/engine.hpp"

#include <cassert>

namespace brsim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::FrameArrival: return "arrival";
    case EventKind::TimerFire: return "timer";
    case EventKind::DecisionEpoch: return "epoch";
    case EventKind::BeaconTick: return "beacon";
  }
  return "?";
}

std::string_view to_string(TimerTag tag) {
  switch (tag) {
    case TimerTag::None: return "none";
    case TimerTag::PacketGenerate: return "generate";
    case TimerTag::ResponseWait: return "response-wait";
    case TimerTag::AckWait: return "ack-wait";
    case TimerTag::BackoffDone: return "backoff-done";
    case TimerTag::ResponseJitter: return "response-jitter";
    case TimerTag::CsmaBackoff: return "csma-backoff";
    case TimerTag::CsmaCca: return "csma-cca";
  }
  return "?";
}

std::uint64_t Engine::schedule(Event event) {
  if (event.time < now_) {
    throw PastEvent("event scheduled before the current simulation time");
  }
  event.seq = next_seq_++;
  const std::uint64_t seq = event.seq;
  queue_.push(std::move(event));
  return seq;
}

std::uint64_t Engine::run_until(SimTime horizon, const Handler& handler) {
  std::uint64_t count = 0;
  while (!queue_.empty() && queue_.top().time <= horizon) {
    Event event = queue_.top();
    queue_.pop();
    assert(event.time >= now_);
    now_ = event.time;
    ++processed_;
    ++count;
    if (trace_ != nullptr) write_trace(event);
    handler(event);
  }
  if (now_ < horizon) now_ = horizon;
  return count;
}

std::uint32_t Engine::draw_uniform(NodeId node, std::uint32_t bound) {
  auto it = streams_.find(node);
  if (it == streams_.end()) it = streams_.emplace(node, RngStream(run_seed_, node)).first;
  return it->second.uniform(bound);
}

void Engine::write_trace(const Event& event) const {
  std::ostream& out = *trace_;
  out << event.time.count() << '\t' << to_string(event.kind) << '\t' << event.node.value;
  switch (event.kind) {
    case EventKind::FrameArrival:
      out << '\t' << to_string(type_of(*event.frame)) << '\t' << event.peer.value;
      break;
    case EventKind::TimerFire:
      out << '\t' << to_string(event.tag);
      break;
    default:
      break;
  }
  out << '\n';
}

}  // namespace brsim
