#include "brsim/baseline.hpp"

#include <stdexcept>
#include <string>

namespace brsim {

void CsmaParams::validate() const {
  auto require = [](bool ok, const char* field, const char* why) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + why);
  };
  require(min_be <= max_be, "csma.min_be", "must be <= csma.max_be");
  require(max_be <= 20, "csma.max_be", "must be <= 20");
  require(slot_ms > 0, "csma.slot_ms", "must be > 0");
}

CsmaAttempt::Verdict CsmaAttempt::on_cca(bool busy) {
  if (!busy) return Verdict::Transmit;
  ++nb_;
  be_ = std::min(be_ + 1, params_.max_be);
  return nb_ > params_.max_csma_backoffs ? Verdict::ChannelAccessFailure : Verdict::Retry;
}

std::optional<NodeId> aodv_select_next(std::optional<Rssi> own, std::span<const ResponseRecord> responses) {
  const ResponseRecord* best = nullptr;
  for (const auto& r : responses) {
    if (own && !(r.frame.dst_rssi > *own)) continue;
    if (best == nullptr || r.link_rssi > best->link_rssi ||
        (r.link_rssi == best->link_rssi && r.frame.response_node < best->frame.response_node)) {
      best = &r;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->frame.response_node;
}

}  // namespace brsim
