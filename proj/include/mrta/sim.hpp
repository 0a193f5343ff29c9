#pragma once

#include "mrta/barrier.hpp"
#include "mrta/commgraph.hpp"
#include "mrta/core.hpp"
#include "mrta/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrta {

enum class Integrator { Euler, Rk4FrozenInputs };

struct SimConfig {
  double dt = 1e-3;
  double max_time = 60.0;
  double convergence_tol = 1e-2;
  Integrator integrator = Integrator::Euler;
  bool supervisor_enabled = true;  // false pins every agent to OGA
  LrLaw lr_law = LrLaw::NearestToOga;
  NeighborVelocity neighbor_velocity = NeighborVelocity::PreviousCommand;
  std::size_t min_dwell_steps = 5;      // steps an agent stays in LR before it may leave
  std::size_t min_oga_dwell_steps = 2;  // steps an agent stays in OGA after leaving LR
  double lr_cap_length = 0.0;       // LR speed limited to lambda_i * this; 0 disables
  std::uint64_t seed = 0;  // provenance only; the simulation has no randomness
};

/// dt and max_time come from the scenario, lr_cap_length is set to R_c; the
/// rest keep their defaults.
SimConfig config_from(const Scenario& s);

/// Throws ValidationError; requires lambda_max * dt < 0.5.
void validate_config(const SimConfig& c, const Scenario& s);

struct SimState {
  std::vector<AgentState> agents;
  CommHysteresis links;
  std::size_t step_index = 0;
  std::vector<std::size_t> mode_age;  // steps since each agent's last mode switch
};

SimState initial_state(const Scenario& s);

struct StepReport {
  double time = 0.0;  // start of the step
  std::vector<Mode> modes;
  std::vector<double> q;
  std::vector<double> W;
  std::vector<TriggerEvent> triggers;
  std::vector<DecisionEvent> decisions;
  std::vector<FlagEvent> flags;
  double min_clearance = 0.0;  // after integration
  double total_v = 0.0;        // after integration
};

struct StepResult {
  SimState state;
  StepReport report;
};

class SafetyBreach : public std::runtime_error {
 public:
  SafetyBreach(const std::string& what, StepResult result)
      : std::runtime_error(what), result_(std::move(result)) {}
  const StepResult& result() const { return result_; }

 private:
  StepResult result_;
};

/// One closed-loop step: hysteresis update, component decisions, supervisors,
/// integration. Throws SafetyBreach (carrying the post-step state) when a pair
/// ends within Delta or an agent leaves the workspace.
StepResult step(const SimState& state, const SimConfig& config, const ValidatedScenario& scenario);

/// Steps until every agent is within convergence_tol of its goal or max_time
/// elapses. A breach ends the run and is recorded in the trace.
SimTrace run(const ValidatedScenario& scenario, const SimConfig& config);

double total_distance_to_go(const std::vector<AgentState>& agents, const std::vector<Vec2>& goals);

struct Metrics {
  double total_path_length = 0.0;
  double lr_fraction = 0.0;
  std::size_t decision_count = 0;
  double min_clearance = 0.0;
  std::vector<double> switch_intervals;
};

Metrics metrics(const SimTrace& trace);

}  // namespace mrta
