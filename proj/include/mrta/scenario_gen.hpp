#pragma once

#include "mrta/core.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace mrta {

// Random scenario in the dense-swarm style: robots of radius R, Delta = 2R,
// R_c = 5R, starts and goals drawn from the same small disc.
// Draws are rejected when the optimal straight path of one robot passes
// within path_clearance of another robot's goal.
struct GenParams {
  std::size_t n_agents = 10;
  std::uint64_t seed = 0;
  double robot_radius = 0.5;
  double workspace_radius = 10.0;
  double spawn_radius = 6.0;    // starts and goals are drawn in this disc
  double spacing = 1.5;         // min distance between any two sampled points, in units of Delta
  double goal_spacing = 3.0;    // min distance between two goals, in units of Delta
  double path_clearance = 1.5;  // in units of Delta, see above
  double comm_band_ratio = 0.1; // delta_c / R_c
  double lambda = 1.0;
  double lr_gain = 1.0;
  double aggregation_power = 4.0;
  double grad_floor = 1e-8;
  double dt = 1e-3;
  double max_time = 60.0;
  std::size_t retry_budget = 100000;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling, deterministic per seed. Initial goals are a random
/// permutation, so they are generally not the optimal assignment.
Scenario generate_scenario(const GenParams& p);

// Two robots, R = 0.5. They start within range on the suboptimal assignment, so
// the first decision swaps goals and sends the fast robot (lambda 10) along a
// path passing 0.2 m from the slow one (lambda 1). Under OGA alone they collide.
Scenario swap_scenario();

}  // namespace mrta
