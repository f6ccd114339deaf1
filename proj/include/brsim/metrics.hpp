#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "brsim/engine.hpp"
#include "brsim/frame.hpp"

namespace brsim {

/// One Routing transmission as seen by its intended receiver.
struct HopRecord {
  std::uint64_t packet_uid = 0;
  NodeId from{};
  NodeId to{};
  SimTime time{};
  double distance_m = 0.0;
  bool success = false;
  std::uint32_t attempts = 1;  // 1-based attempt number of the sender
  std::uint32_t hop_count = 0;  // value carried on the wire
};

enum class PacketStatus { Pending, Delivered, Dropped };
enum class DropReason { None, RetryLimit, ChannelAccess, HopCap, Horizon };

std::string_view to_string(PacketStatus status);
std::string_view to_string(DropReason reason);

struct PacketOutcome {
  std::uint64_t uid = 0;
  NodeId source{};
  SimTime generated{};
  PacketStatus status = PacketStatus::Pending;
  DropReason reason = DropReason::None;
  std::uint32_t hops = 0;      // Delivered only
  SimTime finished{};
  std::vector<NodeId> route;   // source ... destination, Delivered only
};

struct ProtocolCounters {
  std::uint64_t routing_frames = 0;
  std::uint64_t relay_forwardings = 0;  // Routing frames addressed to a non-destination node
  std::uint64_t direct_shots = 0;       // Routing frames addressed to the destination
  std::uint64_t decision_epochs = 0;
  std::uint64_t listening_epochs = 0;
  std::uint64_t duplicate_receptions = 0;
  std::uint64_t loop_filter_exclusions = 0;
  std::uint64_t channel_access_failures = 0;
};

class RunMetrics {
 public:
  std::string protocol;
  std::size_t node_count = 0;
  std::uint64_t seed = 0;
  double relay_probability = 0.0;

  std::vector<PacketOutcome> packets;  // indexed by uid
  std::vector<HopRecord> hops;
  ProtocolCounters counters;

  void record_hop(const HopRecord& hop) { hops.push_back(hop); }

  std::size_t generated() const { return packets.size(); }
  std::size_t delivered() const;
  std::size_t dropped() const;

  /// Mean over delivered packets; NaN when none was delivered.
  double mean_hops() const;
  /// Mean length of successful Routing hops; NaN when there is none.
  double mean_per_hop_distance() const;
  /// NaN when no packet was generated.
  double delivery_ratio() const;
};

struct AggregateRow {
  std::string protocol;
  std::size_t node_count = 0;
  std::size_t seed_count = 0;
  double mean_hops = 0.0;
  double sd_hops = 0.0;
  double mean_perhop_distance_m = 0.0;
  double sd_perhop_distance_m = 0.0;
  double delivery_ratio = 0.0;
  double sd_delivery_ratio = 0.0;
};

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mean and sample SD across runs, grouped by (protocol, node_count) in
/// order of first appearance. Runs with an undefined statistic (NaN) are
/// left out of that statistic.
std::vector<AggregateRow> summarize(std::span<const RunMetrics> runs);

inline constexpr std::string_view kCsvHeader =
    "protocol,node_count,seed_count,mean_hops,sd_hops,mean_perhop_distance_m,"
    "sd_perhop_distance_m,delivery_ratio";

void write_csv(std::span<const AggregateRow> rows, std::ostream& out);
void write_csv(std::span<const AggregateRow> rows, const std::filesystem::path& path);
std::vector<AggregateRow> read_csv(std::istream& in);

/// Tab-separated, one HopRecord per line, '#' header line.
void write_hop_trace(const RunMetrics& metrics, std::ostream& out);
/// Tab-separated per-packet outcome with the route as a '-' joined list.
void write_route_trace(const RunMetrics& metrics, std::ostream& out);

}  // namespace brsim
