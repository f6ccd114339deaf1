#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "brsim/metrics.hpp"
#include "brsim/scenario.hpp"

namespace brsim {

enum class Protocol { Br, Aodv };

std::string_view to_string(Protocol protocol);
std::vector<Protocol> protocols_of(ProtocolSelection selection);

/// One deterministic run of one protocol. When `trace` is set, every
/// processed event is written to it, one line each.
RunMetrics simulate(const Scenario& scenario, Protocol protocol, std::uint64_t seed,
                    std::ostream* trace = nullptr);

/// Runs every protocol the scenario selects on the same topology and seed.
std::vector<RunMetrics> run(const Scenario& scenario, std::uint64_t seed);

}  // namespace brsim
