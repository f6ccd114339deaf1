#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "brsim/metrics.hpp"
#include "brsim/scenario.hpp"

namespace brsim {

/// "A..B", inclusive.
struct NodeRange {
  std::size_t first = 0;
  std::size_t last = 0;
};
NodeRange parse_node_range(std::string_view text);

/// "A..B:STEP", inclusive of B up to rounding. Values are snapped to the
/// step's decimal grid so 0.1..0.9:0.1 yields exactly 0.1, 0.2, ..., 0.9.
std::vector<double> parse_probability_range(std::string_view text);

/// One value of the swept variable, expressed as scenario overrides.
struct SweepPoint {
  std::string label;
  std::vector<std::string> overrides;
};

std::vector<SweepPoint> node_count_points(NodeRange range);
std::vector<SweepPoint> probability_points(const std::vector<double>& values);

struct SweepOptions {
  std::vector<SweepPoint> points;
  std::uint32_t seeds = 1;
  std::uint64_t base_seed = 1;
  unsigned jobs = 1;
  /// Keep an FNV-1a digest of every run's event trace.
  bool trace_digests = false;
};

struct PointResult {
  SweepPoint point;
  /// Ordered by seed index, then by protocol.
  std::vector<RunMetrics> runs;
  std::vector<std::uint64_t> trace_digests;  // parallel to runs when requested
  std::vector<AggregateRow> rows;
};

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs every (point, seed) pair; seed i is base_seed + i whatever the
/// seed count or job count. Results do not depend on `jobs`.
std::vector<PointResult> sweep(const Scenario& base, const SweepOptions& options);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);

}  // namespace brsim
