#include "mrta/scenario_gen.hpp"

#include "mrta/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace mrta {

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + s * ab);
}

// No goal may sit next to the straight path another agent takes under the
// optimal assignment.
bool paths_clear_of_goals(const std::vector<Vec2>& starts, const std::vector<Vec2>& goals, double clearance) {
  const auto best = solve_hungarian(cost_matrix(starts, goals));
  for (std::size_t i = 0; i < starts.size(); ++i)
    for (std::size_t m = 0; m < goals.size(); ++m)
      if (m != best.perm[i] && point_segment_distance(goals[m], starts[i], goals[best.perm[i]]) < clearance)
        return false;
  return true;
}

}  // namespace

Scenario generate_scenario(const GenParams& p) {
  if (p.n_agents < 1) throw GenerationError("need at least one agent");
  if (!(p.spawn_radius > 0.0 && p.spawn_radius < p.workspace_radius))
    throw GenerationError("spawn_radius must lie in (0, workspace_radius)");

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double delta = 2.0 * p.robot_radius;
  const double min_gap = p.spacing * delta;
  const double goal_gap = std::max(p.goal_spacing, p.spacing) * delta;
  const std::size_t n = p.n_agents;

  std::size_t attempts = 0;
  auto budget_left = [&] {
    if (++attempts > p.retry_budget)
      throw GenerationError("rejection sampling exceeded the retry budget; use a larger workspace "
                            "(spawn_radius) or a smaller spacing");
  };

  std::vector<Vec2> goals, starts;
  for (;;) {
    // Goals first, then starts, which keep the smaller gap to everything placed.
    std::vector<Vec2> pts;
    while (pts.size() < 2 * n) {
      budget_left();
      const double r = p.spawn_radius * std::sqrt(unit(rng));
      const double th = 2.0 * M_PI * unit(rng);
      const Vec2 c(r * std::cos(th), r * std::sin(th));
      const double gap = pts.size() < n ? goal_gap : min_gap;
      if (std::all_of(pts.begin(), pts.end(), [&](const Vec2& q) { return distance(c, q) >= gap; }))
        pts.push_back(c);
    }
    goals.assign(pts.begin(), pts.begin() + n);
    starts.assign(pts.begin() + n, pts.end());
    if (paths_clear_of_goals(starts, goals, p.path_clearance * delta)) break;
    budget_left();
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  Scenario s;
  s.min_separation = delta;
  s.comm_range = 5.0 * p.robot_radius;
  s.comm_band = p.comm_band_ratio * s.comm_range;
  s.workspace_center = Vec2::Zero();
  s.workspace_radius = p.workspace_radius;
  s.aggregation_power = p.aggregation_power;
  s.q_band = default_q_band(p.lambda, p.workspace_radius);
  s.grad_floor = p.grad_floor;
  s.dt = p.dt;
  s.max_time = p.max_time;
  for (std::size_t i = 0; i < n; ++i) {
    AgentState a;
    a.id = i;
    a.position = starts[i];
    a.goal_index = perm[i];
    a.lambda = p.lambda;
    s.agents.push_back(a);
    s.goals.push_back(goals[i]);
    s.lr_gains.push_back(p.lr_gain);
  }
  return s;
}

Scenario swap_scenario() {
  Scenario s;
  s.min_separation = 1.0;
  s.comm_range = 2.5;
  s.comm_band = 0.25;
  s.workspace_radius = 10.0;
  s.aggregation_power = 4.0;
  // the default band scales with lambda_max and would be 0.2 here, too wide
  // for the slow robot to ever leave LR near its goal
  s.q_band = 1e-3;
  s.goals = {Vec2(3.0, -0.5), Vec2(6.0, 0.0)};
  s.lr_gains = {1.0, 1.0};
  AgentState slow, fast;
  slow.id = 0;
  slow.position = Vec2(0.0, 0.0);
  slow.goal_index = 0;
  slow.lambda = 1.0;
  fast.id = 1;
  fast.position = Vec2(-2.0, 0.0);
  fast.goal_index = 1;
  fast.lambda = 10.0;
  s.agents = {slow, fast};
  return s;
}

}  // namespace mrta
