#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrta {

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;

using Vec2 = Vec2T<double>;

enum class Mode { Oga, Lr };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct AgentState {
  std::size_t id = 0;
  Vec2 position = Vec2::Zero();
  std::size_t goal_index = 0;
  Mode mode = Mode::Oga;
  double lambda = 1.0;  // 1/s
  Vec2 last_velocity = Vec2::Zero();
};

inline bool operator==(const AgentState& a, const AgentState& b) {
  return a.id == b.id && a.position == b.position && a.goal_index == b.goal_index &&
         a.mode == b.mode && a.lambda == b.lambda && a.last_velocity == b.last_velocity;
}

// All lengths in meters, times in seconds.
struct Scenario {
  std::vector<AgentState> agents;
  std::vector<Vec2> goals;
  double comm_range = 0.0;         // R_c
  double comm_band = 0.0;          // delta_c
  double min_separation = 0.0;     // Delta, nominally twice the robot radius
  Vec2 workspace_center = Vec2::Zero();
  double workspace_radius = 0.0;   // R_0
  double aggregation_power = 4.0;  // delta >= 1
  std::vector<double> lr_gains;    // k_i
  double q_band = 0.0;             // epsilon_Q
  double grad_floor = 1e-8;        // epsilon_g
  double dt = 1e-3;
  double max_time = 60.0;

  bool operator==(const Scenario&) const = default;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thin wrapper marking a scenario that passed validate_scenario.
class ValidatedScenario {
 public:
  const Scenario& get() const { return s_; }
  const Scenario* operator->() const { return &s_; }

 private:
  friend ValidatedScenario validate_scenario(Scenario s);
  explicit ValidatedScenario(Scenario s) : s_(std::move(s)) {}
  Scenario s_;
};

/// Checks every scenario invariant in a fixed order and throws ValidationError
/// naming the first one that fails.
ValidatedScenario validate_scenario(Scenario s);

template <typename Derived1, typename Derived2>
auto distance(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) {
  return (a - b).norm();
}

inline bool is_finite(const Vec2& v) { return v.allFinite(); }

/// Largest lambda over the agents; used for default band sizing and step checks.
double max_lambda(const Scenario& s);

/// Default epsilon_Q: 1e-3 * lambda_max * workspace diameter.
double default_q_band(double lambda_max, double workspace_radius);

}  // namespace mrta
