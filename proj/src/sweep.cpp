#include "brsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "brsim/simulation.hpp"

namespace brsim {
namespace {

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument(std::string(what) + ": not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument(std::string(what) + ": not a count: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t decimals_of(std::string_view text) {
  const auto dot = text.find('.');
  return dot == std::string_view::npos ? 0 : text.size() - dot - 1;
}

}  // namespace

NodeRange parse_node_range(std::string_view text) {
  const auto sep = text.find("..");
  if (sep == std::string_view::npos) throw std::invalid_argument("node range must look like A..B");
  NodeRange r{parse_count(text.substr(0, sep), "node range"), parse_count(text.substr(sep + 2), "node range")};
  if (r.first > r.last) throw std::invalid_argument("node range: A must not exceed B");
  return r;
}

std::vector<double> parse_probability_range(std::string_view text) {
  const auto sep = text.find("..");
  const auto colon = text.find(':');
  if (sep == std::string_view::npos || colon == std::string_view::npos || colon < sep) {
    throw std::invalid_argument("probability range must look like A..B:STEP");
  }
  const std::string_view a = text.substr(0, sep);
  const std::string_view b = text.substr(sep + 2, colon - sep - 2);
  const std::string_view s = text.substr(colon + 1);
  const double first = parse_double(a, "probability range");
  const double last = parse_double(b, "probability range");
  const double step = parse_double(s, "probability range");
  if (!(step > 0.0)) throw std::invalid_argument("probability range: STEP must be > 0");
  if (first < 0.0 || last > 1.0 || first > last) {
    throw std::invalid_argument("probability range: need 0 <= A <= B <= 1");
  }
  const double scale = std::pow(10.0, static_cast<double>(std::max({decimals_of(a), decimals_of(b), decimals_of(s)})));
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = std::round((first + static_cast<double>(i) * step) * scale) / scale;
    if (v > last + 0.5 / scale) break;
    out.push_back(v);
  }
  return out;
}

std::vector<SweepPoint> node_count_points(NodeRange range) {
  std::vector<SweepPoint> out;
  for (std::size_t n = range.first; n <= range.last; ++n) {
    out.push_back({"n" + std::to_string(n), {"topology.generator.count=" + std::to_string(n)}});
  }
  return out;
}

std::vector<SweepPoint> probability_points(const std::vector<double>& values) {
  std::vector<SweepPoint> out;
  for (double p : values) {
    std::ostringstream label;
    label << std::fixed << std::setprecision(2) << "p" << p;
    std::ostringstream value;
    value << std::setprecision(17) << p;
    out.push_back({label.str(), {"br.relay_probability=" + value.str()}});
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::vector<PointResult> sweep(const Scenario& base, const SweepOptions& options) {
  if (options.seeds == 0) throw std::invalid_argument("seeds must be >= 1");

  std::vector<Scenario> scenarios;
  std::vector<PointResult> results;
  for (const SweepPoint& point : options.points) {
    nlohmann::json doc = base.document;
    for (const auto& o : point.overrides) apply_override(doc, o);
    scenarios.push_back(scenario_from_json(std::move(doc)));
    PointResult r;
    r.point = point;
    results.push_back(std::move(r));
  }

  // A point may override the protocol selection.
  std::vector<std::vector<Protocol>> protocols;
  for (std::size_t i = 0; i < results.size(); ++i) {
    protocols.push_back(protocols_of(scenarios[i].protocol));
    const std::size_t per_point = options.seeds * protocols[i].size();
    results[i].runs.resize(per_point);
    if (options.trace_digests) results[i].trace_digests.resize(per_point);
  }

  const std::size_t tasks = results.size() * options.seeds;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;

  // Each task owns a distinct slot of the output, so workers never share
  // mutable state.
  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      const std::size_t pi = task / options.seeds;
      const std::size_t si = task % options.seeds;
      const std::uint64_t seed = options.base_seed + si;
      try {
        const auto& selected = protocols[pi];
        for (std::size_t k = 0; k < selected.size(); ++k) {
          const std::size_t slot = si * selected.size() + k;
          if (options.trace_digests) {
            std::ostringstream trace;
            results[pi].runs[slot] = simulate(scenarios[pi], selected[k], seed, &trace);
            results[pi].trace_digests[slot] = fnv1a(trace.str());
          } else {
            results[pi].runs[slot] = simulate(scenarios[pi], selected[k], seed);
          }
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (first_error.empty()) {
          first_error = "scenario " + scenarios[pi].name + " (" + results[pi].point.label + "), seed " +
                        std::to_string(seed) + ": " + e.what();
        }
        next.store(tasks);
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(tasks)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (!first_error.empty()) throw SweepError(first_error);

  for (auto& r : results) r.rows = summarize(r.runs);
  return results;
}

}  // namespace brsim
