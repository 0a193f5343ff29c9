#include "mrta/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mrta {

const char* to_string(Mode m) { return m == Mode::Oga ? "OGA" : "LR"; }

Mode mode_from_string(const std::string& s) {
  if (s == "OGA") return Mode::Oga;
  if (s == "LR") return Mode::Lr;
  throw ValidationError("unknown mode '" + s + "' (expected OGA or LR)");
}

double max_lambda(const Scenario& s) {
  double m = 0.0;
  for (const auto& a : s.agents) m = std::max(m, a.lambda);
  return m;
}

double default_q_band(double lambda_max, double workspace_radius) {
  return 1e-3 * lambda_max * 2.0 * workspace_radius;
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ValidatedScenario validate_scenario(Scenario s) {
  const std::size_t n = s.agents.size();
  if (n == 0) fail("agents must not be empty");
  if (n != s.goals.size())
    fail("count(agents) must equal count(goals) (" + std::to_string(n) + " vs " +
         std::to_string(s.goals.size()) + ")");

  if (!positive_finite(s.comm_range)) fail("R_c (comm_range) must be positive");
  if (!positive_finite(s.comm_band)) fail("delta_c (comm_band) must be positive");
  if (!positive_finite(s.min_separation)) fail("Delta (min_separation) must be positive");
  if (!positive_finite(s.workspace_radius)) fail("R_0 (workspace_radius) must be positive");
  if (!is_finite(s.workspace_center)) fail("r_0 (workspace_center) must be finite");
  if (!std::isfinite(s.aggregation_power) || s.aggregation_power < 1.0)
    fail("delta (aggregation_power) must be >= 1");
  if (!positive_finite(s.q_band)) fail("epsilon_Q (q_band) must be positive");
  if (!positive_finite(s.grad_floor)) fail("epsilon_g (grad_floor) must be positive");
  if (!positive_finite(s.dt)) fail("dt must be positive");
  if (!positive_finite(s.max_time)) fail("max_time must be positive");

  if (!(s.workspace_radius > s.comm_range))
    fail("R_0 must exceed R_c (workspace_radius=" + num(s.workspace_radius) +
         ", comm_range=" + num(s.comm_range) + ")");
  if (!(s.min_separation < s.comm_range))
    fail("Delta must be less than R_c (min_separation=" + num(s.min_separation) +
         ", comm_range=" + num(s.comm_range) + ")");
  if (!(s.comm_band < s.comm_range)) fail("delta_c must be less than R_c");

  if (s.lr_gains.size() != n) fail("lr_gains must have one entry per agent");
  for (double k : s.lr_gains)
    if (!positive_finite(k)) fail("lr_gains entries (k_i) must be positive");

  std::vector<bool> owned(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = s.agents[i];
    if (a.id != i) fail("agent ids must be 0..N-1 in order (agent " + std::to_string(i) + ")");
    if (!positive_finite(a.lambda)) fail("lambda must be positive (agent " + std::to_string(i) + ")");
    if (!is_finite(a.position) || !is_finite(a.last_velocity))
      fail("agent state must be finite (agent " + std::to_string(i) + ")");
    if (a.goal_index >= n) fail("goal_index out of range (agent " + std::to_string(i) + ")");
    if (owned[a.goal_index]) fail("goal_index values must be a permutation (goal " +
                                  std::to_string(a.goal_index) + " assigned twice)");
    owned[a.goal_index] = true;
  }

  const double r0sq = s.workspace_radius * s.workspace_radius;
  for (std::size_t i = 0; i < n; ++i) {
    if (!((s.agents[i].position - s.workspace_center).squaredNorm() < r0sq))
      fail("initial position must lie strictly inside the workspace (agent " + std::to_string(i) + ")");
  }
  for (std::size_t m = 0; m < n; ++m) {
    if (!is_finite(s.goals[m])) fail("goals must be finite");
    if (!((s.goals[m] - s.workspace_center).squaredNorm() < r0sq))
      fail("goal must lie strictly inside the workspace (goal " + std::to_string(m) + ")");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(distance(s.agents[i].position, s.agents[j].position) > s.min_separation))
        fail("initial pairwise distance ≤ Δ (agents " + std::to_string(i) + ", " +
             std::to_string(j) + ")");
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t l = m + 1; l < n; ++l)
      if (s.goals[m] == s.goals[l])
        fail("goals must be pairwise distinct (goals " + std::to_string(m) + ", " +
             std::to_string(l) + ")");

  return ValidatedScenario(std::move(s));
}

}  // namespace mrta
