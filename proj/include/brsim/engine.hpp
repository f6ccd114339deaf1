#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "brsim/frame.hpp"
#include "brsim/rng.hpp"

namespace brsim {

/// Simulation clock: integer milliseconds since the start of the run.
using SimTime = std::chrono::duration<std::uint64_t, std::milli>;

enum class EventKind : std::uint8_t { FrameArrival, TimerFire, DecisionEpoch, BeaconTick };

enum class TimerTag : std::uint8_t {
  None,
  PacketGenerate,
  ResponseWait,
  AckWait,
  BackoffDone,
  ResponseJitter,
  CsmaBackoff,
  CsmaCca,
};

std::string_view to_string(EventKind kind);
std::string_view to_string(TimerTag tag);

struct Event {
  SimTime time{};
  std::uint64_t seq = 0;  // assigned by Engine::schedule
  EventKind kind = EventKind::TimerFire;
  NodeId node{};  // receiver, timer owner or epoch owner
  NodeId peer{};  // transmitter of a FrameArrival, RTS owner of a ResponseJitter
  TimerTag tag = TimerTag::None;
  std::uint64_t token = 0;  // transmission id or timer generation
  std::optional<Frame> frame;
};

class PastEvent : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Single-threaded discrete-event scheduler with per-node random streams.
/// Events pop in (time, seq) order; seq is assigned at scheduling time, so
/// equal-time events run in the order they were scheduled.
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;

  explicit Engine(std::uint64_t run_seed) : run_seed_(run_seed) {}

  SimTime now() const { return now_; }
  std::uint64_t run_seed() const { return run_seed_; }

  /// Returns the assigned seq. Throws PastEvent if event.time < now().
  std::uint64_t schedule(Event event);

  /// Processes events with time <= horizon, then moves the clock to horizon.
  std::uint64_t run_until(SimTime horizon, const Handler& handler);

  /// Uniform draw in [0, bound) from the node's own stream.
  std::uint32_t draw_uniform(NodeId node, std::uint32_t bound);

  /// One line per processed event: time, kind, node, detail.
  void set_trace(std::ostream* trace) { trace_ = trace; }

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t scheduled() const { return next_seq_; }
  std::uint64_t processed() const { return processed_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void write_trace(const Event& event) const;

  std::uint64_t run_seed_;
  SimTime now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unordered_map<NodeId, RngStream> streams_;
  std::ostream* trace_ = nullptr;
};

}  // namespace brsim
