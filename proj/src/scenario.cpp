#include "brsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace brsim {
namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

/// Typed access to one JSON object, naming fields by their dotted path and
/// rejecting keys nobody asked about.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const {
    seen_.insert(std::string(key));
    return node_.contains(key);
  }

  const json& raw(std::string_view key) const {
    seen_.insert(std::string(key));
    return node_.at(std::string(key));
  }

  Section object(std::string_view key) const { return Section(raw(key), field(key)); }

  double number(std::string_view key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ValidationError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(field(key), "must be finite");
    return d;
  }

  std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback,
                                 std::uint64_t max = std::numeric_limits<std::uint32_t>::max()) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ValidationError(field(key), "expected a non-negative integer");
    }
    const auto u = v.get<std::uint64_t>();
    if (u > max) throw ValidationError(field(key), "out of range");
    return u;
  }

  std::uint32_t u32(std::string_view key, std::uint32_t fallback) const {
    return static_cast<std::uint32_t>(unsigned_integer(key, fallback));
  }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ValidationError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(std::string_view key, std::string fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ValidationError(field(key), "expected a string");
    return v.get<std::string>();
  }

  void reject_unknown() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ValidationError(field(key), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

NodeId node_id(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() >= NodeId::kBroadcastValue) {
    throw ValidationError(field, "expected a node id in [0, 65534]");
  }
  return NodeId{static_cast<std::uint16_t>(v.get<std::int64_t>())};
}

Position position(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ValidationError(field, "expected [x, y]");
  }
  return Position{v[0].get<double>(), v[1].get<double>()};
}

ChannelParams read_channel(const Section& s, double& wall_default_db) {
  ChannelParams p;
  p.tx_power_dbm = s.number("tx_power_dbm", p.tx_power_dbm);
  p.ref_distance_m = s.number("ref_distance_m", p.ref_distance_m);
  p.ref_loss_db = s.number("ref_loss_db", p.ref_loss_db);
  p.path_loss_exponent = s.number("path_loss_exponent", p.path_loss_exponent);
  p.noise_floor_dbm = s.number("noise_floor_dbm", p.noise_floor_dbm);
  p.target_sir_db = s.number("target_sir_db", p.target_sir_db);
  p.tx_range_m = s.number("tx_range_m", p.tx_range_m);
  p.beacon_range_m = s.number("beacon_range_m", p.beacon_range_m);
  p.interference = s.boolean("interference", p.interference);
  p.frame_airtime_ms = s.u32("frame_airtime_ms", p.frame_airtime_ms);
  wall_default_db = s.number("wall_attenuation_db", wall_default_db);
  s.reject_unknown();
  return p;
}

BrParams read_br(const Section& s) {
  BrParams p;
  p.relay_probability = s.number("relay_probability", p.relay_probability);
  p.response_wait_ms = s.u32("response_wait_ms", p.response_wait_ms);
  p.ack_wait_ms = s.u32("ack_wait_ms", p.ack_wait_ms);
  p.bcast_ms = s.u32("bcast_ms", p.bcast_ms);
  p.loop_threshold = s.u32("loop_threshold", p.loop_threshold);
  p.slot_ms = s.u32("slot_ms", p.slot_ms);
  p.response_slot_bound = s.u32("response_slot_bound", p.response_slot_bound);
  p.max_backoff_exponent = s.u32("max_backoff_exponent", p.max_backoff_exponent);
  p.max_tx_attempts = s.u32("max_tx_attempts", p.max_tx_attempts);
  // Epoch length follows the handshake timescale unless set explicitly.
  p.epoch_ms = s.u32("epoch_ms", p.response_wait_ms);
  p.hard_hop_cap = s.u32("hard_hop_cap", 4 * p.loop_threshold);
  s.reject_unknown();
  return p;
}

CsmaParams read_csma(const Section& s) {
  CsmaParams p;
  p.min_be = s.u32("min_be", p.min_be);
  p.max_be = s.u32("max_be", p.max_be);
  p.max_csma_backoffs = s.u32("max_csma_backoffs", p.max_csma_backoffs);
  p.cca_ms = s.u32("cca_ms", p.cca_ms);
  p.slot_ms = s.u32("slot_ms", p.slot_ms);
  s.reject_unknown();
  return p;
}

template <class Fn>
void rethrow_as_validation(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon == std::string::npos) throw ValidationError("<scenario>", what);
    throw ValidationError(what.substr(0, colon), what.substr(colon + 2));
  }
}

}  // namespace

Topology tandem_topology(std::size_t count, double floor_width_m, double floor_length_m) {
  if (count < 2) throw ValidationError("topology.generator.count", "a tandem needs at least 2 nodes");
  if (count >= NodeId::kBroadcastValue) throw ValidationError("topology.generator.count", "too many nodes");
  if (!(floor_length_m > 0.0)) throw ValidationError("topology.generator.floor_length_m", "must be > 0");
  if (!(floor_width_m >= 0.0)) throw ValidationError("topology.generator.floor_width_m", "must be >= 0");
  Topology t;
  t.destination = NodeId{0};
  const double y = floor_width_m / 2.0;
  const double spacing = floor_length_m / static_cast<double>(count - 1);
  t.nodes[NodeId{0}] = Position{floor_length_m, y};
  for (std::size_t i = 1; i < count; ++i) {
    t.nodes[NodeId{static_cast<std::uint16_t>(i)}] = Position{spacing * static_cast<double>(i - 1), y};
  }
  return t;
}

Topology grid_topology(std::size_t rows, std::size_t cols, double spacing_m) {
  if (rows == 0 || cols == 0 || rows * cols < 2) {
    throw ValidationError("topology.generator", "a grid needs at least 2 nodes");
  }
  if (rows * cols >= NodeId::kBroadcastValue) throw ValidationError("topology.generator", "too many nodes");
  if (!(spacing_m > 0.0)) throw ValidationError("topology.generator.spacing_m", "must be > 0");
  Topology t;
  t.destination = NodeId{0};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto id = static_cast<std::uint16_t>(r * cols + c);
      t.nodes[NodeId{id}] = Position{spacing_m * static_cast<double>(c), spacing_m * static_cast<double>(r)};
    }
  }
  return t;
}

void apply_override(json& document, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError(std::string(assignment), "override must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }

  json* node = &document;
  std::size_t begin = 0;
  for (;;) {
    const auto dot = key.find('.', begin);
    const std::string part = key.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (part.empty()) throw ValidationError(key, "empty path component");
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw ValidationError(key, "array index expected at '" + part + "'");
      }
      if (idx >= node->size()) throw ValidationError(key, "array index out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ValidationError(key, "cannot descend into a scalar");
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  *node = std::move(value);
}

Scenario parse_scenario(std::string_view text, std::span<const std::string> overrides) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw ParseError(std::string("scenario parse error at line ") + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return scenario_from_json(std::move(doc));
}

Scenario load_scenario(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

Scenario scenario_from_json(json document) {
  Scenario sc;
  const Section root(document, "");

  sc.name = root.string("name", "unnamed");
  const std::string protocol = root.string("protocol", "both");
  if (protocol == "br") sc.protocol = ProtocolSelection::Br;
  else if (protocol == "aodv") sc.protocol = ProtocolSelection::Aodv;
  else if (protocol == "both") sc.protocol = ProtocolSelection::Both;
  else throw ValidationError("protocol", "expected br, aodv or both");

  sc.horizon = SimTime{root.unsigned_integer("horizon_ms", 0, std::numeric_limits<std::uint64_t>::max())};
  if (sc.horizon.count() == 0) throw ValidationError("horizon_ms", "must be > 0");

  double wall_default_db = 20.0;
  if (root.has("channel")) {
    sc.channel = read_channel(root.object("channel"), wall_default_db);
  }
  if (root.has("br")) sc.br = read_br(root.object("br"));
  else sc.br = read_br(Section(json::object(), "br"));
  if (root.has("csma")) sc.csma = read_csma(root.object("csma"));

  if (!root.has("topology")) throw ValidationError("topology", "missing");
  const Section topo = root.object("topology");
  const bool has_nodes = topo.has("nodes");
  const bool has_generator = topo.has("generator");
  if (has_nodes == has_generator) {
    throw ValidationError("topology", "exactly one of topology.nodes or topology.generator is required");
  }
  std::string generator_type;
  if (has_generator) {
    const Section gen = topo.object("generator");
    generator_type = gen.string("type", "");
    if (generator_type == "tandem") {
      sc.topology = tandem_topology(gen.unsigned_integer("count", 0), gen.number("floor_width_m", 0.0),
                                    gen.number("floor_length_m", 0.0));
    } else if (generator_type == "grid") {
      sc.topology = grid_topology(gen.unsigned_integer("rows", 0), gen.unsigned_integer("cols", 0),
                                  gen.number("spacing_m", 0.0));
    } else {
      throw ValidationError("topology.generator.type", "expected tandem or grid");
    }
    gen.reject_unknown();
    if (topo.has("destination")) sc.topology.destination = node_id(topo.raw("destination"), "topology.destination");
  } else {
    const json& nodes = topo.raw("nodes");
    if (!nodes.is_array() || nodes.empty()) throw ValidationError("topology.nodes", "expected a non-empty array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string path = "topology.nodes." + std::to_string(i);
      const Section n(nodes[i], path);
      if (!n.has("id")) throw ValidationError(path + ".id", "missing");
      const NodeId id = node_id(n.raw("id"), path + ".id");
      if (!n.has("x") || !n.has("y")) throw ValidationError(path, "missing x or y");
      const Position p{n.number("x", 0.0), n.number("y", 0.0)};
      if (!sc.topology.nodes.emplace(id, p).second) {
        throw ValidationError(path + ".id", "duplicate node id " + std::to_string(id.value));
      }
      if (n.has("report_offset_db")) sc.report_offset_db[id] = n.number("report_offset_db", 0.0);
      n.reject_unknown();
    }
    if (!topo.has("destination")) throw ValidationError("topology.destination", "missing");
    sc.topology.destination = node_id(topo.raw("destination"), "topology.destination");
  }
  if (topo.has("walls")) {
    const json& walls = topo.raw("walls");
    if (!walls.is_array()) throw ValidationError("topology.walls", "expected an array");
    for (std::size_t i = 0; i < walls.size(); ++i) {
      const std::string path = "topology.walls." + std::to_string(i);
      const Section w(walls[i], path);
      if (!w.has("a") || !w.has("b")) throw ValidationError(path, "missing a or b");
      WallSegment seg{position(w.raw("a"), path + ".a"), position(w.raw("b"), path + ".b"),
                      w.number("attenuation_db", wall_default_db)};
      w.reject_unknown();
      sc.topology.walls.push_back(seg);
    }
  }
  if (topo.has("report_offsets")) {
    const json& offs = topo.raw("report_offsets");
    if (!offs.is_object()) throw ValidationError("topology.report_offsets", "expected an object");
    for (const auto& [key, value] : offs.items()) {
      const std::string path = "topology.report_offsets." + key;
      std::size_t used = 0;
      unsigned long raw = 0;
      try {
        raw = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || raw >= NodeId::kBroadcastValue) throw ValidationError(path, "expected a node id key");
      if (!value.is_number()) throw ValidationError(path, "expected a number");
      sc.report_offset_db[NodeId{static_cast<std::uint16_t>(raw)}] = value.get<double>();
    }
  }
  if (topo.has("area")) {
    const Section area = topo.object("area");
    const double length = area.number("length_m", 0.0);
    const double width = area.number("width_m", 0.0);
    area.reject_unknown();
    if (!(length > 0.0 && width > 0.0)) throw ValidationError("topology.area", "length_m and width_m must be > 0");
    for (const auto& [id, p] : sc.topology.nodes) {
      if (p.x < 0.0 || p.x > length || p.y < 0.0 || p.y > width) {
        throw ValidationError("topology.nodes", "node " + std::to_string(id.value) + " lies outside topology.area");
      }
    }
  }
  topo.reject_unknown();

  rethrow_as_validation([&] {
    sc.topology.validate();
    sc.channel.validate();
    sc.br.validate();
    sc.csma.validate();
  });
  for (const auto& [id, off] : sc.report_offset_db) {
    if (!sc.topology.nodes.contains(id)) {
      throw ValidationError("topology.report_offsets", "unknown node " + std::to_string(id.value));
    }
  }

  // Traffic.
  if (root.has("traffic")) {
    const Section tr = root.object("traffic");
    std::vector<NodeId> sources;
    if (tr.has("sources")) {
      const json& s = tr.raw("sources");
      if (s.is_string() && s.get<std::string>() == "all") {
        for (const auto& [id, p] : sc.topology.nodes) {
          if (id != sc.topology.destination) sources.push_back(id);
        }
      } else if (s.is_array()) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          sources.push_back(node_id(s[i], "traffic.sources." + std::to_string(i)));
        }
      } else {
        throw ValidationError("traffic.sources", "expected \"all\" or an array of node ids");
      }
    }
    sc.traffic.sources = std::move(sources);
    sc.traffic.packets_per_source = tr.u32("packets_per_source", 1);
    sc.traffic.inter_arrival = SimTime{tr.unsigned_integer("inter_arrival_ms", 0)};
    sc.traffic.start = SimTime{tr.unsigned_integer("start_ms", 0)};
    tr.reject_unknown();
  }
  if (sc.traffic.sources.empty()) {
    if (generator_type == "tandem") {
      sc.traffic.sources.push_back(NodeId{1});
    } else {
      for (const auto& [id, p] : sc.topology.nodes) {
        if (id != sc.topology.destination) sc.traffic.sources.push_back(id);
      }
    }
  }
  for (NodeId s : sc.traffic.sources) {
    if (!sc.topology.nodes.contains(s)) {
      throw ValidationError("traffic.sources", "unknown node " + std::to_string(s.value));
    }
    if (s == sc.topology.destination) throw ValidationError("traffic.sources", "the destination cannot be a source");
  }

  root.reject_unknown();
  sc.document = std::move(document);
  return sc;
}

}  // namespace brsim
