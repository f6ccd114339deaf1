#include "brsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace brsim {
namespace {

// Comparisons against the sensitivity threshold tolerate this much floating
// error so that a node placed exactly at tx_range_m is still in range.
constexpr double kBoundaryEpsilonDb = 1e-9;

double to_linear(double db) { return std::pow(10.0, db / 10.0); }

double cross(Position o, Position a, Position b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) {
  constexpr double kEps = 1e-12;
  if (v > kEps) return 1;
  if (v < -kEps) return -1;
  return 0;
}

bool on_segment(Position p, Position a, Position b) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw std::invalid_argument(field + ": " + why);
}

}  // namespace

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ChannelParams::validate() const {
  require(std::isfinite(tx_power_dbm), "channel.tx_power_dbm", "must be finite");
  require(ref_distance_m > 0.0, "channel.ref_distance_m", "must be > 0");
  require(std::isfinite(ref_loss_db), "channel.ref_loss_db", "must be finite");
  require(path_loss_exponent >= 1.0, "channel.path_loss_exponent", "must be >= 1");
  require(std::isfinite(noise_floor_dbm), "channel.noise_floor_dbm", "must be finite");
  require(std::isfinite(target_sir_db), "channel.target_sir_db", "must be finite");
  require(tx_range_m > 0.0, "channel.tx_range_m", "must be > 0");
  require(beacon_range_m >= 0.0, "channel.beacon_range_m", "must be >= 0");
  require(frame_airtime_ms >= 1, "channel.frame_airtime_ms", "must be >= 1");
  require(sensitivity_dbm() <= tx_power_dbm, "channel.tx_range_m",
          "implies a sensitivity above the transmit power");
}

double ChannelParams::sensitivity_dbm() const {
  return tx_power_dbm - path_loss(tx_range_m, 0, *this, 0.0);
}

double ChannelParams::beacon_boost_db() const {
  if (beacon_range_m <= 0.0) return 0.0;
  return path_loss(beacon_range_m, 0, *this, 0.0) - path_loss(tx_range_m, 0, *this, 0.0);
}

void Topology::validate() const {
  require(!nodes.empty(), "topology.nodes", "no nodes");
  require(nodes.contains(destination), "topology.destination", "not a node of the topology");
  for (const auto& [id, pos] : nodes) {
    require(!id.is_broadcast(), "topology.nodes", "id 65535 is reserved for broadcast");
    require(std::isfinite(pos.x) && std::isfinite(pos.y), "topology.nodes",
            "non-finite position for node " + std::to_string(id.value));
  }
  for (const auto& w : walls) {
    require(!(w.a == w.b), "topology.walls", "degenerate wall segment");
    require(w.attenuation_db >= 0.0, "topology.walls", "negative attenuation");
  }
}

double path_loss(double d, int wall_crossings, const ChannelParams& params, double wall_db) {
  const double clamped = std::max(d, params.ref_distance_m);
  return params.ref_loss_db +
         10.0 * params.path_loss_exponent * std::log10(clamped / params.ref_distance_m) +
         wall_crossings * wall_db;
}

bool segments_intersect(Position p1, Position p2, Position q1, Position q2) {
  const int d1 = sign(cross(q1, q2, p1));
  const int d2 = sign(cross(q1, q2, p2));
  const int d3 = sign(cross(p1, p2, q1));
  const int d4 = sign(cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

double wall_loss_db(Position a, Position b, std::span<const WallSegment> walls) {
  double loss = 0.0;
  for (const auto& w : walls) {
    if (segments_intersect(a, b, w.a, w.b)) loss += w.attenuation_db;
  }
  return loss;
}

int wall_crossings(Position a, Position b, std::span<const WallSegment> walls) {
  return static_cast<int>(std::count_if(walls.begin(), walls.end(), [&](const WallSegment& w) {
    return segments_intersect(a, b, w.a, w.b);
  }));
}

Rssi rssi(Position tx, Position rx, const Topology& topology, const ChannelParams& params) {
  const double loss = path_loss(distance(tx, rx), 0, params, 0.0) + wall_loss_db(tx, rx, topology.walls);
  return Rssi{static_cast<std::int16_t>(std::lround(params.tx_power_dbm - loss))};
}

Channel::Channel(Topology topology, ChannelParams params)
    : topology_(std::move(topology)), params_(params) {
  topology_.validate();
  params_.validate();
  sensitivity_dbm_ = params_.sensitivity_dbm();

  index_.assign(NodeId::kBroadcastValue + 1, -1);
  for (const auto& [id, pos] : topology_.nodes) {
    index_[id.value] = static_cast<int>(ids_.size());
    ids_.push_back(id);
  }
  const std::size_t n = ids_.size();
  loss_db_.assign(n * n, 0.0);
  distance_m_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Position a = topology_.nodes.at(ids_[i]);
    for (std::size_t j = i; j < n; ++j) {
      const Position b = topology_.nodes.at(ids_[j]);
      const double d = brsim::distance(a, b);
      const double loss = path_loss(d, 0, params_, 0.0) + wall_loss_db(a, b, topology_.walls);
      loss_db_[i * n + j] = loss_db_[j * n + i] = loss;
      distance_m_[i * n + j] = distance_m_[j * n + i] = d;
    }
  }
}

std::size_t Channel::index_of(NodeId id) const {
  const int idx = index_[id.value];
  if (idx < 0) throw std::out_of_range("node " + std::to_string(id.value) + " not in topology");
  return static_cast<std::size_t>(idx);
}

bool Channel::contains(NodeId id) const { return index_[id.value] >= 0; }

double Channel::received_dbm(NodeId tx, NodeId rx, double power_offset_db) const {
  const std::size_t n = ids_.size();
  return params_.tx_power_dbm + power_offset_db - loss_db_[index_of(tx) * n + index_of(rx)];
}

Rssi Channel::rssi(NodeId tx, NodeId rx, double power_offset_db) const {
  return Rssi{static_cast<std::int16_t>(std::lround(received_dbm(tx, rx, power_offset_db)))};
}

double Channel::distance(NodeId a, NodeId b) const {
  return distance_m_[index_of(a) * ids_.size() + index_of(b)];
}

bool Channel::can_hear(NodeId tx, NodeId rx, double power_offset_db) const {
  return received_dbm(tx, rx, power_offset_db) >= sensitivity_dbm_ - kBoundaryEpsilonDb;
}

bool Channel::delivery_success(NodeId tx, NodeId rx, std::span<const NodeId> concurrent) const {
  std::vector<Emitter> emitters;
  emitters.reserve(concurrent.size());
  for (NodeId id : concurrent) emitters.push_back(Emitter{id, 0.0});
  return delivery_success(Emitter{tx, 0.0}, rx, emitters);
}

bool Channel::delivery_success(const Emitter& signal, NodeId rx,
                               std::span<const Emitter> concurrent) const {
  if (!can_hear(signal.node, rx, signal.power_offset_db)) return false;
  double noise_mw = to_linear(params_.noise_floor_dbm);
  if (params_.interference) {
    for (const auto& e : concurrent) noise_mw += to_linear(received_dbm(e.node, rx, e.power_offset_db));
  }
  const double signal_mw = to_linear(received_dbm(signal.node, rx, signal.power_offset_db));
  // A tie with the target succeeds.
  return 10.0 * std::log10(signal_mw / noise_mw) >= params_.target_sir_db - kBoundaryEpsilonDb;
}

}  // namespace brsim
