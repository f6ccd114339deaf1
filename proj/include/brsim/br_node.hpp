#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "brsim/engine.hpp"
#include "brsim/frame.hpp"
#include "brsim/medium.hpp"

namespace brsim {

/// Protocol timers and limits. Times are milliseconds.
struct BrParams {
  double relay_probability = 0.73;
  std::uint32_t response_wait_ms = 5000;
  std::uint32_t ack_wait_ms = 2000;
  std::uint32_t bcast_ms = 10000;
  std::uint32_t loop_threshold = 10;
  std::uint32_t slot_ms = 20;
  std::uint32_t response_slot_bound = 8;
  std::uint32_t max_backoff_exponent = 5;
  std::uint32_t max_tx_attempts = 8;
  std::uint32_t epoch_ms = 5000;
  std::uint32_t hard_hop_cap = 40;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class Mode { Transmitting, Listening };

enum class Phase { Idle, AwaitResponses, AwaitAck, Backoff };

/// A Response as collected by the RTS owner, with the strength it was
/// received at.
struct ResponseRecord {
  Response frame;
  Rssi link_rssi;
};

/// Per-node forwarding state shared by BR and the baseline.
struct RelayNodeState {
  NodeId id{};
  std::optional<Rssi> dst_rssi;  // absent until the first beacon is heard
  std::deque<PacketMeta> tx_queue;
  std::vector<ResponseRecord> response_buffer;
  std::uint32_t attempt_count = 0;  // failed attempts for the head packet
  SimTime backoff_until{};
  /// packet uid -> nodes that delivered that packet to this node
  std::map<std::uint64_t, std::set<NodeId>> prior_forwarders;

  Phase phase = Phase::Idle;
  NodeId pending_target{};
  std::uint64_t timer_generation = 0;  // bumping it voids armed timers
};

struct BrNodeState : RelayNodeState {
  Mode mode = Mode::Transmitting;  // silent until the first coin flip
};

/// Where to send the head packet: straight at the destination, or to a relay.
struct ForwardTarget {
  enum class Kind { Shoot, Pass };
  Kind kind = Kind::Shoot;
  NodeId relay{};

  static ForwardTarget shoot() { return {}; }
  static ForwardTarget pass(NodeId id) { return {Kind::Pass, id}; }
  bool operator==(const ForwardTarget&) const = default;
};

/// The coin is drawn on a grid of this many steps.
inline constexpr std::uint32_t kCoinGrid = 1'000'000;

/// Listening iff draw < p * kCoinGrid, so p = 0 and p = 1 are exact.
Mode mode_for_draw(double relay_probability, std::uint32_t draw);

/// Flips the node's coin for a new epoch and stores the result.
Mode decision_epoch(BrNodeState& node, const BrParams& params, Engine& engine);

/// Latest beacon wins.
void on_dst_beacon(RelayNodeState& node, Rssi measured);

/// Once the packet has exceeded loop_threshold hops, drops every node that
/// earlier handed this packet to `node`.
std::set<NodeId> loop_filter(const RelayNodeState& node, const PacketMeta& packet,
                             std::set<NodeId> candidates, std::uint32_t loop_threshold);

/// Strongest reported beacon wins, lowest id on ties. Shoots when nobody
/// answered or when the node's own beacon strength is at least the best.
ForwardTarget select_forwarder(std::optional<Rssi> own, std::span<const Response> responses);

/// Contention window, in slots, for the given failed-attempt count.
std::uint32_t beb_window(std::uint32_t attempt, std::uint32_t max_exponent);

struct BackoffDecision {
  bool drop = false;
  SimTime delay{};
};

/// Counts one failed attempt. Past max_tx_attempts the packet is dropped;
/// otherwise the node backs off for a uniform draw from the window.
BackoffDecision beb_backoff(RelayNodeState& node, const BrParams& params, Engine& engine);

}  // namespace brsim
