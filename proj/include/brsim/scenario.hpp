#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "brsim/baseline.hpp"
#include "brsim/br_node.hpp"
#include "brsim/channel.hpp"
#include "brsim/engine.hpp"

namespace brsim {

enum class ProtocolSelection { Br, Aodv, Both };

struct TrafficSpec {
  std::vector<NodeId> sources;
  std::uint32_t packets_per_source = 1;
  SimTime inter_arrival{0};
  SimTime start{0};
};

/// A fully validated experiment description with every default filled in.
struct Scenario {
  std::string name;
  ProtocolSelection protocol = ProtocolSelection::Both;
  Topology topology;
  /// Added to the beacon strength a node reports in its Responses
  /// (a miscalibrated transceiver). Absent means 0.
  std::map<NodeId, double> report_offset_db;
  ChannelParams channel;
  BrParams br;
  CsmaParams csma;
  TrafficSpec traffic;
  SimTime horizon{0};

  /// The document this scenario was built from, after overrides.
  nlohmann::json document;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& why)
      : std::runtime_error(field + ": " + why), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Applies `dotted.key=value` to the document. The value is parsed as JSON
/// when possible (numbers, booleans, arrays) and kept as a string otherwise.
void apply_override(nlohmann::json& document, std::string_view assignment);

Scenario parse_scenario(std::string_view text, std::span<const std::string> overrides = {});
Scenario load_scenario(const std::filesystem::path& path, std::span<const std::string> overrides = {});
Scenario scenario_from_json(nlohmann::json document);

/// Equal spacing along the centerline of the long axis. Node 1 (the
/// source) sits at x = 0, the destination (node 0) at x = floor_length,
/// relays 2..count-1 in between.
Topology tandem_topology(std::size_t count, double floor_width_m, double floor_length_m);

/// rows x cols lattice; the destination (node 0) is at the origin corner.
Topology grid_topology(std::size_t rows, std::size_t cols, double spacing_m);

}  // namespace brsim
