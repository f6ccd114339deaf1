#include "brsim/br_node.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace brsim {
namespace {

void require(bool ok, const char* field, const char* why) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + why);
}

}  // namespace

void BrParams::validate() const {
  require(relay_probability >= 0.0 && relay_probability <= 1.0, "br.relay_probability",
          "must be in [0, 1]");
  require(response_wait_ms > 0, "br.response_wait_ms", "must be > 0");
  require(ack_wait_ms > 0, "br.ack_wait_ms", "must be > 0");
  require(bcast_ms > 0, "br.bcast_ms", "must be > 0");
  require(loop_threshold >= 1, "br.loop_threshold", "must be >= 1");
  require(slot_ms > 0, "br.slot_ms", "must be > 0");
  require(response_slot_bound >= 1, "br.response_slot_bound", "must be >= 1");
  require(max_backoff_exponent <= 20, "br.max_backoff_exponent", "must be <= 20");
  require(max_tx_attempts >= 1, "br.max_tx_attempts", "must be >= 1");
  require(epoch_ms > 0, "br.epoch_ms", "must be > 0");
  require(hard_hop_cap > loop_threshold, "br.hard_hop_cap", "must exceed br.loop_threshold");
}

Mode mode_for_draw(double relay_probability, std::uint32_t draw) {
  const auto threshold = static_cast<std::uint64_t>(std::llround(relay_probability * kCoinGrid));
  return draw < threshold ? Mode::Listening : Mode::Transmitting;
}

Mode decision_epoch(BrNodeState& node, const BrParams& params, Engine& engine) {
  node.mode = mode_for_draw(params.relay_probability, engine.draw_uniform(node.id, kCoinGrid));
  return node.mode;
}

void on_dst_beacon(RelayNodeState& node, Rssi measured) { node.dst_rssi = measured; }

std::set<NodeId> loop_filter(const RelayNodeState& node, const PacketMeta& packet,
                             std::set<NodeId> candidates, std::uint32_t loop_threshold) {
  if (packet.hop_count <= loop_threshold) return candidates;
  const auto it = node.prior_forwarders.find(packet.uid);
  if (it == node.prior_forwarders.end()) return candidates;
  for (NodeId prior : it->second) candidates.erase(prior);
  return candidates;
}

ForwardTarget select_forwarder(std::optional<Rssi> own, std::span<const Response> responses) {
  const Response* best = nullptr;
  for (const auto& r : responses) {
    if (best == nullptr || r.dst_rssi > best->dst_rssi ||
        (r.dst_rssi == best->dst_rssi && r.response_node < best->response_node)) {
      best = &r;
    }
  }
  if (best == nullptr) return ForwardTarget::shoot();
  if (own && *own >= best->dst_rssi) return ForwardTarget::shoot();
  return ForwardTarget::pass(best->response_node);
}

std::uint32_t beb_window(std::uint32_t attempt, std::uint32_t max_exponent) {
  return std::uint32_t{1} << std::min(attempt, max_exponent);
}

BackoffDecision beb_backoff(RelayNodeState& node, const BrParams& params, Engine& engine) {
  ++node.attempt_count;
  if (node.attempt_count > params.max_tx_attempts) return BackoffDecision{true, SimTime{0}};
  const std::uint32_t slots =
      engine.draw_uniform(node.id, beb_window(node.attempt_count, params.max_backoff_exponent));
  const SimTime delay{static_cast<std::uint64_t>(slots) * params.slot_ms};
  node.backoff_until = engine.now() + delay;
  return BackoffDecision{false, delay};
}

}  // namespace brsim
