#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>

#include "brsim/br_node.hpp"
#include "brsim/frame.hpp"

namespace brsim {

/// Unslotted CSMA/CA constants. Times are milliseconds.
struct CsmaParams {
  std::uint32_t min_be = 3;
  std::uint32_t max_be = 5;
  std::uint32_t max_csma_backoffs = 4;
  std::uint32_t cca_ms = 8;
  std::uint32_t slot_ms = 4;

  void validate() const;
};

/// Channel access for one frame. The driver waits
/// draw_uniform(backoff_window()) slots, senses for cca_ms, then reports
/// the result to on_cca().
class CsmaAttempt {
 public:
  enum class Verdict { Transmit, Retry, ChannelAccessFailure };

  explicit CsmaAttempt(const CsmaParams& params) : params_(params), be_(params.min_be) {}

  std::uint32_t backoff_window() const { return std::uint32_t{1} << be_; }
  std::uint32_t be() const { return be_; }
  std::uint32_t nb() const { return nb_; }

  Verdict on_cca(bool busy);

 private:
  CsmaParams params_;
  std::uint32_t be_;
  std::uint32_t nb_ = 0;
};

/// A frame waiting for, or contending for, the channel.
struct QueuedFrame {
  Frame frame;
  NodeId addressee{};
  std::optional<PacketMeta> packet;
  std::uint32_t attempt = 0;
};

struct AodvNodeState : RelayNodeState {
  std::deque<QueuedFrame> mac_queue;
  std::optional<CsmaAttempt> csma;  // contention state of mac_queue.front()
  SimTime cca_started{};
};

/// Nearest-by-signal progress: among responders reporting a stronger
/// beacon than `own`, the one heard loudest (lowest id on ties). nullopt
/// means send straight to the destination.
std::optional<NodeId> aodv_select_next(std::optional<Rssi> own, std::span<const ResponseRecord> responses);

}  // namespace brsim
