#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "brsim/frame.hpp"

namespace brsim {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

double distance(Position a, Position b);

struct WallSegment {
  Position a;
  Position b;
  double attenuation_db = 20.0;
};

/// Log-distance radio parameters. Reception is gated by a sensitivity
/// calibrated so that the wall-free reach equals tx_range_m.
struct ChannelParams {
  double tx_power_dbm = 0.0;
  double ref_distance_m = 1.0;
  double ref_loss_db = 40.0;
  double path_loss_exponent = 3.0;
  double noise_floor_dbm = -95.0;
  double target_sir_db = 10.0;
  double tx_range_m = 30.0;
  /// Wall-free reach of destination beacons; 0 means tx_range_m. The
  /// difference is applied as extra beacon transmit power.
  double beacon_range_m = 0.0;
  /// When false, concurrent transmissions do not count as interference.
  bool interference = true;
  /// Air time of every frame.
  std::uint32_t frame_airtime_ms = 4;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  double sensitivity_dbm() const;
  double beacon_boost_db() const;
};

struct Topology {
  std::map<NodeId, Position> nodes;
  std::vector<WallSegment> walls;
  NodeId destination{};

  void validate() const;
};

/// refLoss + 10 n log10(max(d, d0) / d0) + crossings * wall_db
double path_loss(double d, int wall_crossings, const ChannelParams& params, double wall_db);

/// True when the closed segments p1-p2 and q1-q2 share a point.
bool segments_intersect(Position p1, Position p2, Position q1, Position q2);

/// Total attenuation of walls crossed by the straight path a-b.
double wall_loss_db(Position a, Position b, std::span<const WallSegment> walls);
int wall_crossings(Position a, Position b, std::span<const WallSegment> walls);

/// Received strength rounded to whole dBm.
Rssi rssi(Position tx, Position rx, const Topology& topology, const ChannelParams& params);

/// A transmitter as seen by a receiver: who, and at what power offset
/// relative to tx_power_dbm.
struct Emitter {
  NodeId node;
  double power_offset_db = 0.0;
};

/// Precomputed pairwise link budget for one topology. Immutable after
/// construction.
class Channel {
 public:
  Channel(Topology topology, ChannelParams params);

  const Topology& topology() const { return topology_; }
  const ChannelParams& params() const { return params_; }
  std::span<const NodeId> node_ids() const { return ids_; }
  std::size_t node_count() const { return ids_.size(); }
  std::size_t index_of(NodeId id) const;
  bool contains(NodeId id) const;

  /// Unrounded received power in dBm.
  double received_dbm(NodeId tx, NodeId rx, double power_offset_db = 0.0) const;
  Rssi rssi(NodeId tx, NodeId rx, double power_offset_db = 0.0) const;
  double distance(NodeId a, NodeId b) const;

  /// Received power at or above sensitivity. Evaluated on the unrounded
  /// power so that, without walls, this is exactly distance <= tx_range_m.
  bool can_hear(NodeId tx, NodeId rx, double power_offset_db = 0.0) const;

  /// can_hear and signal / (noise + sum of interferers) >= target SIR.
  bool delivery_success(NodeId tx, NodeId rx, std::span<const NodeId> concurrent) const;
  bool delivery_success(const Emitter& signal, NodeId rx,
                        std::span<const Emitter> concurrent) const;

 private:
  Topology topology_;
  ChannelParams params_;
  std::vector<NodeId> ids_;
  std::vector<int> index_;  // NodeId value -> dense index, -1 when absent
  std::vector<double> loss_db_;  // row-major, n x n
  std::vector<double> distance_m_;
  double sensitivity_dbm_;
};

}  // namespace brsim
