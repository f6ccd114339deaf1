// Command-line front end: single runs and parameter sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "brsim/metrics.hpp"
#include "brsim/scenario.hpp"
#include "brsim/simulation.hpp"
#include "brsim/sweep.hpp"

namespace fs = std::filesystem;
using namespace brsim;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void write_run_outputs(const fs::path& dir, const RunMetrics& m) {
  const std::string tag = lower(m.protocol);
  auto hops = open_out(dir / ("hops_" + tag + ".tsv"));
  write_hop_trace(m, hops);
  auto routes = open_out(dir / ("routes_" + tag + ".tsv"));
  write_route_trace(m, routes);
}

int do_run(const std::string& scenario_path, std::uint64_t seed, const fs::path& out_dir,
           const std::string& protocol, bool trace, const std::vector<std::string>& sets) {
  std::vector<std::string> overrides = sets;
  if (!protocol.empty()) overrides.push_back("protocol=" + protocol);
  const Scenario scenario = load_scenario(scenario_path, overrides);
  fs::create_directories(out_dir);

  std::vector<RunMetrics> runs;
  for (Protocol p : protocols_of(scenario.protocol)) {
    if (trace) {
      auto t = open_out(out_dir / ("trace_" + lower(std::string(to_string(p))) + ".tsv"));
      runs.push_back(simulate(scenario, p, seed, &t));
    } else {
      runs.push_back(simulate(scenario, p, seed));
    }
    write_run_outputs(out_dir, runs.back());
  }
  write_csv(summarize(runs), out_dir / "summary.csv");

  for (const auto& m : runs) {
    std::cout << m.protocol << ": generated " << m.generated() << ", delivered " << m.delivered()
              << ", mean hops " << m.mean_hops() << ", mean per-hop distance " << m.mean_per_hop_distance()
              << " m\n";
  }
  return 0;
}

int do_sweep(const std::string& scenario_path, const std::string& nodes, const std::string& probabilities,
             std::uint32_t seeds, std::uint64_t base_seed, unsigned jobs, bool digests, const fs::path& out_dir,
             const std::vector<std::string>& sets) {
  const Scenario base = load_scenario(scenario_path, sets);
  SweepOptions options;
  options.seeds = seeds;
  options.base_seed = base_seed;
  options.jobs = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  options.trace_digests = digests;
  const bool by_nodes = !nodes.empty();
  options.points = by_nodes ? node_count_points(parse_node_range(nodes))
                            : probability_points(parse_probability_range(probabilities));

  const std::vector<PointResult> results = sweep(base, options);
  fs::create_directories(out_dir);

  if (by_nodes) {
    std::vector<AggregateRow> rows;
    for (const auto& r : results) rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    write_csv(rows, out_dir / "summary.csv");
  } else {
    for (const auto& r : results) write_csv(r.rows, out_dir / ("summary_" + r.point.label + ".csv"));
  }

  if (digests) {
    auto out = open_out(out_dir / "digests.tsv");
    out << "# point\tseed\tprotocol\tfnv1a\n";
    for (const auto& r : results) {
      for (std::size_t i = 0; i < r.runs.size(); ++i) {
        out << r.point.label << '\t' << r.runs[i].seed << '\t' << r.runs[i].protocol << '\t' << std::hex
            << std::setw(16) << std::setfill('0') << r.trace_digests[i] << std::dec << std::setfill(' ') << '\n';
      }
    }
  }
  std::cout << "wrote " << results.size() << " sweep point(s) to " << out_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for basketball routing and an AODV/CSMA baseline"};
  app.require_subcommand(1);

  std::string scenario;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string protocol;
  bool trace = false;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "Run one scenario with one seed");
  run->add_option("--scenario", scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Run seed")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--protocol", protocol, "Override the scenario's protocol")
      ->check(CLI::IsMember({"br", "aodv", "both"}));
  run->add_flag("--trace", trace, "Write the full event trace");
  run->add_option("--set", sets, "Override a scenario key: dotted.key=value (repeatable)");

  std::string nodes;
  std::string probabilities;
  std::uint32_t seeds = 1;
  unsigned jobs = 0;
  bool digests = false;
  auto* sw = app.add_subcommand("sweep", "Sweep node count or relay probability over many seeds");
  sw->add_option("--scenario", scenario, "Scenario template (JSON)")->required()->check(CLI::ExistingFile);
  auto* nodes_opt = sw->add_option("--nodes", nodes, "Node-count range A..B");
  auto* p_opt = sw->add_option("--p", probabilities, "Relay-probability range A..B:STEP");
  nodes_opt->excludes(p_opt);
  sw->add_option("--seeds", seeds, "Seeds per point")->required()->check(CLI::PositiveNumber);
  sw->add_option("--seed", seed, "First seed; seed i is this plus i");
  sw->add_option("--out", out, "Output directory")->required();
  sw->add_option("--jobs", jobs, "Worker threads (0: one per core)");
  sw->add_flag("--digests", digests, "Write per-run event-trace digests");
  sw->add_option("--set", sets, "Override a scenario key: dotted.key=value (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(scenario, seed, out, protocol, trace, sets);
    if (nodes.empty() && probabilities.empty()) {
      std::cerr << "brsim sweep: one of --nodes or --p is required\n";
      return 2;
    }
    return do_sweep(scenario, nodes, probabilities, seeds, seed, jobs, digests, out, sets);
  } catch (const ParseError& e) {
    std::cerr << "brsim: " << scenario << ":" << e.line() << ":" << e.column() << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "brsim: " << scenario << " (seed " << seed << "): " << e.what() << '\n';
  }
  return 1;
}
