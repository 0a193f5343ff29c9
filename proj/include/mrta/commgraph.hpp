#pragma once

#include "mrta/core.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace mrta {

// Discrete communication state of one agent pair.
enum class Link { Disconnected = 1, Connected = 2 };

using AgentPair = std::pair<std::size_t, std::size_t>;  // first < second

inline AgentPair make_pair_key(std::size_t i, std::size_t j) {
  return i < j ? AgentPair{i, j} : AgentPair{j, i};
}

// Per-pair link memory. Pairs not present are Disconnected.
struct CommHysteresis {
  std::map<AgentPair, Link> pair_sigma;

  Link sigma(std::size_t i, std::size_t j) const;
  bool operator==(const CommHysteresis&) const = default;
};

struct HysteresisUpdate {
  CommHysteresis state;
  std::set<AgentPair> newly_connected;  // decision triggers
};

// Connect at d <= R_c, drop at d > R_c + delta_c, hold otherwise. Only the
// Disconnected -> Connected transition yields a trigger.
HysteresisUpdate update_hysteresis(const CommHysteresis& prev, std::span<const Vec2> positions,
                                   double comm_range, double comm_band);

struct ComponentSet {
  // Each group sorted ascending; groups ordered by smallest member.
  std::vector<std::vector<std::size_t>> components;

  // Index into components for every agent.
  std::vector<std::size_t> component_of(std::size_t n_agents) const;
};

ComponentSet connected_components(const CommHysteresis& h, std::size_t n_agents);

}  // namespace mrta
