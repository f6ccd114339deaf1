// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "brsim/channel.hpp"
#include "brsim/frame.hpp"
#include "brsim/simulation.hpp"
#include "brsim/sweep.hpp"

using namespace brsim;

namespace {

const std::string kDir = BRSIM_SCENARIO_DIR;

// Pinned tolerances and sizes.
constexpr std::uint32_t kSweepSeeds = 100;
constexpr std::size_t kSweepFirst = 5;
constexpr std::size_t kSweepLast = 15;
constexpr int kAllowedTrendViolations = 1;   // adjacent pairs, each within 1 sample SD
constexpr std::uint32_t kSaturationSeeds = 100;
constexpr std::size_t kSaturationMinVisited = 9;  // of the 10 intermediates
constexpr std::uint64_t kBeaconsInDegenerateRun = 10;
constexpr std::uint32_t kLoopSeeds = 1000;
constexpr std::uint32_t kWallSeeds = 200;
constexpr double kWallExtraDb = 10.0;  // attenuation above the direct-link margin
constexpr int kCodecFrames = 100000;
constexpr std::uint64_t kCoinEpochs = 10000;
constexpr double kCoinSigmas = 4.0;
constexpr double kCoinP = 0.73;

struct Verdict {
  bool pass = false;
  std::string detail;
};

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void report(int number, const std::string& name, const Verdict& v, double seconds, int& failures) {
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << number << "  " << name << "  (" << std::fixed
            << std::setprecision(1) << seconds << " s)  " << v.detail << std::endl;
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

// The tandem sweep is shared by the first two criteria.
struct TandemSweep {
  std::map<std::string, std::vector<AggregateRow>> by_protocol;  // ordered by node count
};

TandemSweep tandem_sweep() {
  const Scenario base = load_scenario(kDir + "/tandem12.json", std::vector<std::string>{"protocol=both"});
  SweepOptions o;
  o.points = node_count_points({kSweepFirst, kSweepLast});
  o.seeds = kSweepSeeds;
  o.jobs = jobs();
  TandemSweep out;
  for (const auto& point : sweep(base, o)) {
    for (const auto& row : point.rows) out.by_protocol[row.protocol].push_back(row);
  }
  return out;
}

Verdict hop_ordering(const TandemSweep& s) {
  const auto& br = s.by_protocol.at("BR");
  const auto& aodv = s.by_protocol.at("AODV");
  std::ostringstream why;
  bool ok = true;
  for (std::size_t i = 0; i < br.size(); ++i) {
    if (!(br[i].mean_hops <= aodv[i].mean_hops)) {
      ok = false;
      why << "n=" << br[i].node_count << " BR " << fmt(br[i].mean_hops) << " > AODV " << fmt(aodv[i].mean_hops)
          << "; ";
    }
  }
  const double gap_first = aodv.front().mean_hops - br.front().mean_hops;
  const double gap_last = aodv.back().mean_hops - br.back().mean_hops;
  if (!(gap_last > gap_first)) {
    ok = false;
    why << "gap does not grow; ";
  }
  why << "gap n=" << br.front().node_count << ": " << fmt(gap_first) << ", n=" << br.back().node_count << ": "
      << fmt(gap_last);
  return {ok, why.str()};
}

// Counts adjacent increases; an increase is tolerated (once) if it is
// within one sample SD of the larger-n point.
bool non_increasing(const std::vector<AggregateRow>& rows, std::string& why) {
  int tolerated = 0;
  bool ok = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double rise = rows[i].mean_perhop_distance_m - rows[i - 1].mean_perhop_distance_m;
    if (rise <= 0.0) continue;
    const double sd = std::max(rows[i].sd_perhop_distance_m, rows[i - 1].sd_perhop_distance_m);
    if (rise <= sd && tolerated < kAllowedTrendViolations) {
      ++tolerated;
      continue;
    }
    ok = false;
    why += rows[i].protocol + " n=" + std::to_string(rows[i - 1].node_count) + "->" +
           std::to_string(rows[i].node_count) + " rises " + fmt(rise) + " m (sd " + fmt(sd) + "); ";
  }
  return ok;
}

Verdict perhop_trends(const TandemSweep& s) {
  const auto& br = s.by_protocol.at("BR");
  const auto& aodv = s.by_protocol.at("AODV");
  std::string why;
  bool ok = non_increasing(br, why);
  ok = non_increasing(aodv, why) && ok;
  for (std::size_t i = 0; i < br.size(); ++i) {
    if (!(br[i].mean_perhop_distance_m >= aodv[i].mean_perhop_distance_m)) {
      ok = false;
      why += "n=" + std::to_string(br[i].node_count) + " BR shorter than AODV; ";
    }
  }
  std::string curve = "BR per-hop m:";
  for (const auto& r : br) curve += " " + fmt(r.mean_perhop_distance_m, 2);
  curve += " | AODV:";
  for (const auto& r : aodv) curve += " " + fmt(r.mean_perhop_distance_m, 2);
  return {ok, why + curve};
}

Verdict saturation() {
  const Scenario s = load_scenario(kDir + "/tandem12.json",
                                   std::vector<std::string>{"channel.interference=false", "protocol=both"});
  const RunMetrics aodv = simulate(s, Protocol::Aodv, 1);
  std::set<NodeId> intermediates;
  for (const auto& [id, pos] : s.topology.nodes) {
    if (id != s.topology.destination && id != NodeId{1}) intermediates.insert(id);
  }
  // The AODV route must be the same for every packet.
  std::vector<NodeId> route;
  bool deterministic = true;
  for (const auto& p : aodv.packets) {
    if (p.status != PacketStatus::Delivered) continue;
    if (route.empty()) route = p.route;
    deterministic &= p.route == route;
  }
  std::size_t visited = 0;
  for (NodeId n : route) visited += intermediates.contains(n);

  SweepOptions o;
  o.points = {SweepPoint{"n12", {"protocol=br"}}};
  o.seeds = kSaturationSeeds;
  o.jobs = jobs();
  const auto br = sweep(s, o);
  std::vector<std::uint32_t> br_hops;
  for (const auto& m : br[0].runs) {
    for (const auto& p : m.packets) {
      if (p.status == PacketStatus::Delivered) br_hops.push_back(p.hops);
    }
  }
  std::vector<std::uint32_t> aodv_hops;
  for (const auto& p : aodv.packets) {
    if (p.status == PacketStatus::Delivered) aodv_hops.push_back(p.hops);
  }
  auto median = [](std::vector<std::uint32_t> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? double(v[n / 2]) : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };
  const double br_median = median(br_hops), aodv_median = median(aodv_hops);
  const bool ok = deterministic && visited >= kSaturationMinVisited && br_median < aodv_median;
  return {ok, "AODV route visits " + std::to_string(visited) + "/" + std::to_string(intermediates.size()) +
                  " intermediates" + (deterministic ? "" : " (route varies!)") + ", median hops BR " +
                  fmt(br_median, 1) + " vs AODV " + fmt(aodv_median, 1)};
}

Verdict degenerate() {
  const std::string horizon = "horizon_ms=" + std::to_string(kBeaconsInDegenerateRun * 10000);
  std::uint64_t relays_p0 = 0, shots_p0 = 0, routing_p1 = 0, epochs_p1 = 0;
  for (const std::string name : {"tandem12", "motion_testbed", "loop4"}) {
    const Scenario s0 = load_scenario(kDir + "/" + name + ".json",
                                      std::vector<std::string>{"br.relay_probability=0", "protocol=br"});
    const Scenario s1 = load_scenario(kDir + "/" + name + ".json",
                                      std::vector<std::string>{"br.relay_probability=1", "protocol=br", horizon,
                                                               "br.bcast_ms=10000"});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const RunMetrics a = simulate(s0, Protocol::Br, seed);
      relays_p0 += a.counters.relay_forwardings;
      shots_p0 += a.counters.direct_shots;
      const RunMetrics b = simulate(s1, Protocol::Br, seed);
      routing_p1 += b.counters.routing_frames;
      epochs_p1 += b.counters.decision_epochs;
    }
  }
  const bool ok = relays_p0 == 0 && shots_p0 > 0 && routing_p1 == 0 && epochs_p1 > 0;
  return {ok, "p=0: " + std::to_string(relays_p0) + " relay forwardings, " + std::to_string(shots_p0) +
                  " shots; p=1: " + std::to_string(routing_p1) + " Routing frames over " +
                  std::to_string(epochs_p1) + " epochs"};
}

Verdict loop_free() {
  const Scenario s = load_scenario(kDir + "/loop4.json");
  SweepOptions o;
  o.points = {SweepPoint{"loop4", {}}};
  o.seeds = kLoopSeeds;
  o.jobs = jobs();
  const auto result = sweep(s, o);
  std::size_t packets = 0, unterminated = 0, over_cap = 0, back_to_prior = 0, past_threshold = 0;
  std::uint32_t max_forwardings = 0;
  for (const auto& m : result[0].runs) {
    for (const auto& p : m.packets) {
      ++packets;
      if (p.status == PacketStatus::Pending || p.reason == DropReason::Horizon) ++unterminated;
    }
    // Replay successful hops in time order, rebuilding each node's record
    // of who handed it which packet.
    std::map<std::pair<std::uint64_t, NodeId>, std::set<NodeId>> prior;
    std::map<std::uint64_t, std::uint32_t> forwardings;
    for (const auto& h : m.hops) {
      if (h.hop_count > s.br.loop_threshold) {
        ++past_threshold;
        const auto it = prior.find({h.packet_uid, h.from});
        if (it != prior.end() && it->second.contains(h.to)) ++back_to_prior;
      }
      if (!h.success) continue;
      prior[{h.packet_uid, h.to}].insert(h.from);
      max_forwardings = std::max(max_forwardings, ++forwardings[h.packet_uid]);
    }
  }
  over_cap = max_forwardings > s.br.hard_hop_cap ? 1 : 0;
  const bool ok = packets > 0 && unterminated == 0 && over_cap == 0 && back_to_prior == 0 && past_threshold > 0;
  return {ok, std::to_string(packets) + " packets, " + std::to_string(unterminated) + " unterminated, max " +
                  std::to_string(max_forwardings) + " forwardings (cap " + std::to_string(s.br.hard_hop_cap) +
                  "), " + std::to_string(past_threshold) + " sends past the threshold, " +
                  std::to_string(back_to_prior) + " back to a prior forwarder"};
}

Verdict wall_shadowing() {
  const Scenario plain = load_scenario(kDir + "/motion_testbed.json");
  const NodeId source{9};
  const NodeId dst = plain.topology.destination;
  // Margin of the direct link with the wall taken out.
  Topology open = plain.topology;
  open.walls.clear();
  const Channel free_space(open, plain.channel);
  const double margin = free_space.received_dbm(source, dst) - plain.channel.sensitivity_dbm();
  const double wall_db = margin + kWallExtraDb;

  const Scenario s = load_scenario(
      kDir + "/motion_testbed.json",
      std::vector<std::string>{"channel.wall_attenuation_db=" + fmt(wall_db, 3), "protocol=br"});
  // Door-side nodes: those with a wall-free line to both rooms.
  std::set<NodeId> door_side;
  for (const auto& [id, pos] : s.topology.nodes) {
    if (id == dst) continue;
    bool to_lower = false, to_upper = false;
    for (const auto& [other, opos] : s.topology.nodes) {
      if (other == id) continue;
      if (wall_crossings(pos, opos, s.topology.walls) == 0) {
        (opos.y < 2.0 ? to_lower : to_upper) = true;
      }
    }
    if (to_lower && to_upper && pos.x > 9.5) door_side.insert(id);
  }

  SweepOptions o;
  o.points = {SweepPoint{"wall", {}}};
  o.seeds = kWallSeeds;
  o.jobs = jobs();
  const auto result = sweep(s, o);
  std::size_t delivered = 0, direct = 0, bad_route = 0;
  for (const auto& m : result[0].runs) {
    for (const auto& p : m.packets) {
      if (p.source != source || p.status != PacketStatus::Delivered) continue;
      ++delivered;
      if (p.hops < 2) ++direct;
      const bool via_door = std::any_of(p.route.begin() + 1, p.route.end() - 1,
                                        [&](NodeId n) { return door_side.contains(n); });
      if (!via_door) ++bad_route;
    }
  }
  const bool ok = delivered > 0 && direct == 0 && bad_route == 0 && !door_side.empty();
  std::string doors;
  for (NodeId n : door_side) doors += std::to_string(n.value) + " ";
  return {ok, "wall " + fmt(wall_db, 1) + " dB (margin " + fmt(margin, 1) + "), " + std::to_string(delivered) +
                  " deliveries from node 9, " + std::to_string(direct) + " direct, " + std::to_string(bad_route) +
                  " not via door-side nodes { " + doors + "}"};
}

Verdict codec() {
  std::mt19937_64 gen(0xC0DEC);
  auto u16 = [&] { return static_cast<std::uint16_t>(gen()); };
  const std::size_t lengths[] = {4, 4, 8, 14, 4};
  int mismatches = 0, bad_lengths = 0;
  for (int i = 0; i < kCodecFrames; ++i) {
    Frame f;
    switch (gen() % 5) {
      case 0: f = SrcBcast{NodeId{u16()}}; break;
      case 1: f = DstBcast{NodeId{u16()}}; break;
      case 2: f = Response{NodeId{u16()}, NodeId{u16()}, Rssi{static_cast<std::int16_t>(u16())}}; break;
      case 3:
        f = Routing{NodeId{u16()}, NodeId{u16()}, NodeId{u16()}, NodeId{u16()}, static_cast<std::uint32_t>(gen())};
        break;
      default: f = Ack{NodeId{u16()}}; break;
    }
    const auto bytes = encode_frame(f);
    if (bytes.size() != lengths[f.index()]) ++bad_lengths;
    if (!(decode_frame(bytes) == f) || encode_frame(decode_frame(bytes)) != bytes) ++mismatches;
  }
  const bool ok = mismatches == 0 && bad_lengths == 0;
  return {ok, std::to_string(kCodecFrames) + " frames, " + std::to_string(mismatches) + " mismatches, " +
                  std::to_string(bad_lengths) + " wrong lengths"};
}

Verdict determinism() {
  bool ok = true;
  std::string detail;
  for (const std::string name : {"tandem12", "motion_testbed", "loop4"}) {
    const Scenario s = load_scenario(kDir + "/" + name + ".json", std::vector<std::string>{"protocol=both"});
    for (Protocol p : protocols_of(s.protocol)) {
      std::ostringstream a, b;
      simulate(s, p, 42, &a);
      simulate(s, p, 42, &b);
      if (a.str() != b.str() || a.str().empty()) {
        ok = false;
        detail += name + "/" + std::string(to_string(p)) + " traces differ; ";
      }
    }
  }
  const Scenario base = load_scenario(kDir + "/tandem12.json",
                                      std::vector<std::string>{"traffic.packets_per_source=20", "horizon_ms=1300000"});
  SweepOptions o;
  o.points = node_count_points({5, 10});
  o.seeds = 8;
  o.trace_digests = true;
  o.jobs = 1;
  const auto serial = sweep(base, o);
  o.jobs = std::max(4u, jobs());
  const auto parallel = sweep(base, o);
  std::size_t compared = 0;
  for (std::size_t i = 0; i < serial.size(); ++i) {
    if (serial[i].trace_digests != parallel[i].trace_digests) {
      ok = false;
      detail += "sweep digests differ at " + serial[i].point.label + "; ";
    }
    compared += serial[i].trace_digests.size();
  }
  return {ok, detail + "3 scenarios x both protocols re-run; " + std::to_string(compared) +
                  " sweep traces identical serial vs " + std::to_string(o.jobs) + " workers"};
}

Verdict coin() {
  // A destination and one listener; no traffic, so the node only flips
  // its coin. The horizon covers the required number of epochs.
  const std::string text = R"({
    "protocol": "br",
    "horizon_ms": HORIZON,
    "topology": { "destination": 0, "nodes": [ {"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 3, "y": 0} ] },
    "br": { "relay_probability": P },
    "traffic": { "sources": [1], "packets_per_source": 0 }
  })";
  std::string doc = text;
  doc.replace(doc.find("HORIZON"), 7, std::to_string(kCoinEpochs * 5000));
  doc.replace(doc.find("P }"), 1, fmt(kCoinP, 2));
  const Scenario s = parse_scenario(doc);
  const RunMetrics m = simulate(s, Protocol::Br, 2024);
  const double n = static_cast<double>(m.counters.decision_epochs);
  const double frac = m.counters.listening_epochs / n;
  const double sigma = std::sqrt(kCoinP * (1 - kCoinP) / n);
  const double z = (frac - kCoinP) / sigma;
  const bool ok = m.counters.decision_epochs >= kCoinEpochs && std::abs(z) <= kCoinSigmas;
  return {ok, std::to_string(m.counters.decision_epochs) + " epochs, listening fraction " + fmt(frac, 4) +
                  " (z = " + fmt(z, 2) + ")"};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  auto timed = [&](int number, const std::string& name, auto&& fn) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    report(number, name, v, std::chrono::duration<double>(Clock::now() - t0).count(), failures);
  };

  const auto t0 = Clock::now();
  TandemSweep tandem;
  bool sweep_ok = true;
  try {
    tandem = tandem_sweep();
  } catch (const std::exception& e) {
    sweep_ok = false;
    std::cout << "tandem sweep failed: " << e.what() << std::endl;
  }
  const double sweep_s = std::chrono::duration<double>(Clock::now() - t0).count();
  std::cout << "tandem sweep n=" << kSweepFirst << ".." << kSweepLast << ", " << kSweepSeeds
            << " seeds, both protocols: " << std::fixed << std::setprecision(1) << sweep_s << " s" << std::endl;

  timed(1, "hop-count ordering", [&] { return sweep_ok ? hop_ordering(tandem) : Verdict{false, "no sweep"}; });
  timed(2, "per-hop distance trends", [&] { return sweep_ok ? perhop_trends(tandem) : Verdict{false, "no sweep"}; });
  timed(3, "AODV tandem saturation", saturation);
  timed(4, "degenerate relay probabilities", degenerate);
  timed(5, "loop-free termination", loop_free);
  timed(6, "wall shadowing", wall_shadowing);
  timed(7, "codec conformance", codec);
  timed(8, "determinism", determinism);
  timed(9, "coin statistics", coin);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion/criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
