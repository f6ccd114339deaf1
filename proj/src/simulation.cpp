#include "brsim/simulation.hpp"

#include "protocols.hpp"

namespace brsim {

std::string_view to_string(Protocol protocol) {
  return protocol == Protocol::Br ? "BR" : "AODV";
}

std::vector<Protocol> protocols_of(ProtocolSelection selection) {
  switch (selection) {
    case ProtocolSelection::Br:
      return {Protocol::Br};
    case ProtocolSelection::Aodv:
      return {Protocol::Aodv};
    case ProtocolSelection::Both:
      break;
  }
  return {Protocol::Br, Protocol::Aodv};
}

RunMetrics simulate(const Scenario& scenario, Protocol protocol, std::uint64_t seed, std::ostream* trace) {
  if (protocol == Protocol::Br) return detail::BrNetwork(scenario, seed, trace).run();
  return detail::AodvNetwork(scenario, seed, trace).run();
}

std::vector<RunMetrics> run(const Scenario& scenario, std::uint64_t seed) {
  std::vector<RunMetrics> out;
  for (Protocol p : protocols_of(scenario.protocol)) out.push_back(simulate(scenario, p, seed));
  return out;
}

}  // namespace brsim
