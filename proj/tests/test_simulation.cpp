#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "brsim/simulation.hpp"
#include "brsim/sweep.hpp"

using namespace brsim;

namespace {

const std::string kDir = BRSIM_SCENARIO_DIR;

Scenario tandem(std::vector<std::string> extra = {}) {
  extra.push_back("traffic.packets_per_source=10");
  extra.push_back("horizon_ms=700000");
  return load_scenario(kDir + "/tandem12.json", extra);
}

std::string trace_of(const Scenario& s, Protocol p, std::uint64_t seed) {
  std::ostringstream out;
  simulate(s, p, seed, &out);
  return out.str();
}

const char* kPair = R"({
  "horizon_ms": 200000,
  "topology": { "destination": 0, "nodes": [ {"id": 0, "x": 0, "y": 0}, {"id": 1, "x": DIST, "y": 0} ] },
  "channel": { "tx_range_m": 6.0, "beacon_range_m": 12.0 },
  "br": { "relay_probability": 0.0 }
})";

Scenario pair(double dist) {
  std::string text = kPair;
  text.replace(text.find("DIST"), 4, std::to_string(dist));
  return parse_scenario(text);
}

std::vector<std::uint64_t> times_of(const std::string& trace, const std::string& kind, const std::string& node) {
  std::vector<std::uint64_t> out;
  std::istringstream in(trace);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string t, k, n;
    std::getline(f, t, '\t');
    std::getline(f, k, '\t');
    std::getline(f, n, '\t');
    if (k == kind && n == node) out.push_back(std::stoull(t));
  }
  return out;
}

void check_accounting(const RunMetrics& m) {
  CHECK(m.delivered() + m.dropped() == m.generated());
  for (const auto& p : m.packets) {
    CHECK(p.status != PacketStatus::Pending);
    if (p.status != PacketStatus::Delivered) continue;
    REQUIRE(p.route.size() == p.hops + 1);
    for (std::size_t i = 0; i + 1 < p.route.size(); ++i) {
      const NodeId from = p.route[i], to = p.route[i + 1];
      const bool found = std::any_of(m.hops.begin(), m.hops.end(), [&](const HopRecord& h) {
        return h.packet_uid == p.uid && h.success && h.from == from && h.to == to && h.hop_count == i;
      });
      CHECK(found);
    }
  }
  for (const auto& h : m.hops) CHECK(h.attempts >= 1);
}

}  // namespace

TEST_CASE("same seed, same trace; different seed, different trace") {
  const Scenario s = tandem();
  for (Protocol p : {Protocol::Br, Protocol::Aodv}) {
    const std::string a = trace_of(s, p, 5);
    CHECK(!a.empty());
    CHECK(a == trace_of(s, p, 5));
    CHECK(a != trace_of(s, p, 6));
  }
}

TEST_CASE("every packet is accounted for and routes match hop records") {
  const Scenario s = tandem();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (Protocol p : {Protocol::Br, Protocol::Aodv}) check_accounting(simulate(s, p, seed));
  }
  const Scenario m = load_scenario(kDir + "/motion_testbed.json");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) check_accounting(simulate(m, Protocol::Br, seed));
}

TEST_CASE("successful hops never exceed the hearing range") {
  const Scenario s = tandem();
  for (Protocol p : {Protocol::Br, Protocol::Aodv}) {
    const RunMetrics m = simulate(s, p, 3);
    for (const auto& h : m.hops) {
      if (h.success) CHECK(h.distance_m <= s.channel.tx_range_m + 1e-9);
    }
  }
}

TEST_CASE("beacons every bcast period") {
  const Scenario s = pair(3.0);
  const auto t = times_of(trace_of(s, Protocol::Br, 1), "beacon", "0");
  REQUIRE(t.size() >= 3);
  CHECK(t[0] == 0);
  CHECK(t[1] == 10000);
  CHECK(t[2] == 20000);
}

TEST_CASE("a neighbor of the destination delivers in one hop") {
  const Scenario s = pair(3.0);
  for (Protocol p : {Protocol::Br, Protocol::Aodv}) {
    const RunMetrics m = simulate(s, p, 9);
    REQUIRE(m.delivered() == 1);
    CHECK(m.packets[0].hops == 1);
    CHECK(m.counters.direct_shots == 1);
  }
}

TEST_CASE("the selection timer fires one response wait after the RTS") {
  const Scenario s = pair(3.0);
  const std::string trace = trace_of(s, Protocol::Br, 4);
  const auto epochs = times_of(trace, "epoch", "1");
  const auto waits = times_of(trace, "timer", "1");
  const RunMetrics m = simulate(s, Protocol::Br, 4);
  REQUIRE(m.hops.size() == 1);
  const std::uint64_t routing_sent = m.hops[0].time.count() - s.channel.frame_airtime_ms;
  // With p = 0 the first epoch after generation sends the RTS.
  CHECK(std::find(epochs.begin(), epochs.end(), routing_sent - 5000) != epochs.end());
  CHECK(std::find(waits.begin(), waits.end(), routing_sent) != waits.end());
}

TEST_CASE("an unreachable destination exhausts the retry limit") {
  const Scenario s = pair(10.0);
  const RunMetrics m = simulate(s, Protocol::Br, 2);
  REQUIRE(m.dropped() == 1);
  CHECK(m.packets[0].reason == DropReason::RetryLimit);
  CHECK(m.hops.size() == s.br.max_tx_attempts + 1);
  for (std::size_t i = 0; i < m.hops.size(); ++i) {
    CHECK_FALSE(m.hops[i].success);
    CHECK(m.hops[i].attempts == i + 1);
  }
}

TEST_CASE("degenerate relay probabilities") {
  const Scenario zero = tandem({"br.relay_probability=0"});
  const RunMetrics z = simulate(zero, Protocol::Br, 1);
  CHECK(z.counters.relay_forwardings == 0);
  CHECK(z.counters.routing_frames > 0);
  CHECK(z.counters.listening_epochs == 0);

  const Scenario one = tandem({"br.relay_probability=1", "horizon_ms=100000"});
  const RunMetrics o = simulate(one, Protocol::Br, 1);
  CHECK(o.counters.routing_frames == 0);
  CHECK(o.counters.decision_epochs == o.counters.listening_epochs);
}

TEST_CASE("AODV tandem route does not depend on the seed without interference") {
  const Scenario s = tandem({"channel.interference=false"});
  const RunMetrics a = simulate(s, Protocol::Aodv, 1);
  const RunMetrics b = simulate(s, Protocol::Aodv, 77);
  REQUIRE(a.delivered() == a.generated());
  REQUIRE(b.delivered() == b.generated());
  for (std::size_t i = 0; i < a.packets.size(); ++i) CHECK(a.packets[i].route == b.packets[i].route);
  CHECK(a.packets[0].hops == 11);
}

TEST_CASE("the loop scenario ping-pongs and then escapes") {
  const Scenario s = load_scenario(kDir + "/loop4.json");
  bool looped = false;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const RunMetrics m = simulate(s, Protocol::Br, seed);
    check_accounting(m);
    for (const auto& h : m.hops) looped |= h.hop_count > s.br.loop_threshold;
  }
  CHECK(looped);
}

TEST_CASE("run covers the selected protocols") {
  const Scenario s = tandem({"traffic.packets_per_source=2", "horizon_ms=200000"});
  const auto runs = run(s, 1);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].protocol == "BR");
  CHECK(runs[1].protocol == "AODV");
  CHECK(runs[0].node_count == 12);
}

TEST_CASE("range parsing") {
  const NodeRange r = parse_node_range("5..15");
  CHECK(r.first == 5);
  CHECK(r.last == 15);
  CHECK_THROWS(parse_node_range("15..5"));
  CHECK_THROWS(parse_node_range("5-15"));
  const auto ps = parse_probability_range("0.1..0.9:0.1");
  REQUIRE(ps.size() == 9);
  CHECK(ps.front() == 0.1);
  CHECK(ps[2] == 0.3);
  CHECK(ps.back() == 0.9);
  CHECK_THROWS(parse_probability_range("0.1..1.5:0.1"));
  CHECK_THROWS(parse_probability_range("0.1..0.9"));
}

TEST_CASE("sweeps: job count and seed count do not change results") {
  const Scenario s = tandem({"traffic.packets_per_source=3", "horizon_ms=250000"});
  SweepOptions o;
  o.points = node_count_points({5, 7});
  o.seeds = 3;
  o.trace_digests = true;
  o.jobs = 1;
  const auto serial = sweep(s, o);
  o.jobs = 4;
  const auto parallel = sweep(s, o);
  REQUIRE(serial.size() == 3);
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].trace_digests == parallel[i].trace_digests);

  o.seeds = 1;
  const auto single = sweep(s, o);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(single[i].trace_digests[0] == serial[i].trace_digests[0]);
    CHECK(single[i].trace_digests[1] == serial[i].trace_digests[1]);
  }
  CHECK(serial[0].rows.size() == 2);
  CHECK(serial[0].rows[0].node_count == 5);
}

TEST_CASE("sweep failures name the scenario and seed") {
  const Scenario s = tandem();
  SweepOptions o;
  o.points = {SweepPoint{"bad", {"br.relay_probability=3"}}};
  CHECK_THROWS(sweep(s, o));
}
