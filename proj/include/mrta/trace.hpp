#pragma once

#include "mrta/assignment.hpp"
#include "mrta/commgraph.hpp"
#include "mrta/core.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mrta {

struct DecisionEvent {
  double time = 0.0;
  std::vector<std::size_t> members;
  Assignment assignment;      // full assignment after this decision
  double old_cost = 0.0;      // component distance-to-go before
  double new_cost = 0.0;      // and after
  bool changed = false;
  double total_v_after = 0.0; // global distance-to-go right after the decision
};

struct ModeSwitch {
  double time = 0.0;
  std::size_t agent = 0;
  Mode mode = Mode::Oga;
};

struct TriggerEvent {
  double time = 0.0;
  AgentPair pair;
};

enum class StepFlag { BarrierClamped, DegenerateLr, LrSaturated, LrEntryDelayed };

struct FlagEvent {
  double time = 0.0;
  std::size_t agent = 0;
  StepFlag flag = StepFlag::BarrierClamped;
};

enum class Termination { Running, Converged, Timeout, Breach };

const char* to_string(Termination t);

// Record k holds the positions at times[k] together with the goal, mode and
// command that moved each agent over the step ending at times[k]. Record 0 is
// the initial state.
struct SimTrace {
  std::vector<double> times;
  std::vector<std::vector<AgentState>> states;
  std::vector<std::vector<double>> q;  // supervisor surface value under OGA, per agent
  std::vector<std::vector<double>> W;
  std::vector<DecisionEvent> assignments;
  std::vector<ModeSwitch> mode_switches;
  std::vector<TriggerEvent> triggers;
  std::vector<FlagEvent> flags;
  std::vector<double> lyapunov_total;
  std::vector<double> min_clearance;

  Termination termination = Termination::Running;
  std::string termination_detail;
  std::uint64_t seed = 0;
  double min_separation = 0.0;

  std::size_t size() const { return times.size(); }
};

double min_pairwise_clearance(std::span<const Vec2> positions, double min_separation);

}  // namespace mrta
