#include "mrta/commgraph.hpp"
#include "mrta/core.hpp"
#include "mrta/scenario_gen.hpp"

#include <doctest.h>

#include <string>

using namespace mrta;

namespace {

Scenario small_scenario() {
  Scenario s;
  s.comm_range = 2.5;
  s.comm_band = 0.25;
  s.min_separation = 1.0;
  s.workspace_radius = 10.0;
  s.q_band = 0.02;
  s.goals = {Vec2(3, 0), Vec2(-3, 0)};
  s.lr_gains = {1.0, 1.0};
  AgentState a, b;
  a.id = 0;
  a.position = Vec2(0, 0);
  a.goal_index = 0;
  b.id = 1;
  b.position = Vec2(0, 2);
  b.goal_index = 1;
  s.agents = {a, b};
  return s;
}

std::string error_of(const Scenario& s) {
  try {
    validate_scenario(s);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("valid scenario passes") {
  CHECK(error_of(small_scenario()).empty());
  CHECK(error_of(swap_scenario()).empty());
}

TEST_CASE("workspace must be larger than comm range") {
  auto s = small_scenario();
  s.workspace_radius = 2.0;
  const auto e = error_of(s);
  CHECK(e.find("R_0") != std::string::npos);
}

TEST_CASE("validation rejects malformed scenarios") {
  auto s = small_scenario();
  s.goals.pop_back();
  CHECK(error_of(s).find("count") != std::string::npos);

  s = small_scenario();
  s.agents[1].position = Vec2(0.5, 0);
  CHECK(error_of(s).find("Δ") != std::string::npos);

  s = small_scenario();
  s.agents[1].goal_index = 0;
  CHECK(error_of(s).find("permutation") != std::string::npos);

  s = small_scenario();
  s.goals[1] = s.goals[0];
  CHECK_FALSE(error_of(s).empty());

  s = small_scenario();
  s.aggregation_power = 0.5;
  CHECK_FALSE(error_of(s).empty());

  s = small_scenario();
  s.min_separation = 3.0;
  CHECK_FALSE(error_of(s).empty());

  s = small_scenario();
  s.goals[0] = Vec2(12, 0);
  CHECK_FALSE(error_of(s).empty());

  s = small_scenario();
  s.agents[0].lambda = -1;
  CHECK_FALSE(error_of(s).empty());

  s = small_scenario();
  s.agents.clear();
  s.goals.clear();
  s.lr_gains.clear();
  CHECK_FALSE(error_of(s).empty());
}

TEST_CASE("default q band") { CHECK(default_q_band(1.0, 10.0) == doctest::Approx(0.02)); }

TEST_CASE("hysteresis connects, holds inside the band and drops beyond it") {
  const double rc = 2.0, band = 0.2;
  std::vector<Vec2> p{Vec2(0, 0), Vec2(2.0, 0)};
  auto u = update_hysteresis({}, p, rc, band);
  CHECK(u.state.sigma(0, 1) == Link::Connected);
  CHECK(u.newly_connected.size() == 1);

  // inside the band: stays connected, no new trigger
  p[1] = Vec2(2.15, 0);
  auto u2 = update_hysteresis(u.state, p, rc, band);
  CHECK(u2.state.sigma(0, 1) == Link::Connected);
  CHECK(u2.newly_connected.empty());

  // an unconnected pair inside the band stays disconnected
  auto u3 = update_hysteresis({}, p, rc, band);
  CHECK(u3.state.sigma(1, 0) == Link::Disconnected);

  p[1] = Vec2(2.25, 0);
  auto u4 = update_hysteresis(u2.state, p, rc, band);
  CHECK(u4.state.sigma(0, 1) == Link::Disconnected);
  CHECK(u4.newly_connected.empty());

  p[1] = Vec2(1.9, 0);
  auto u5 = update_hysteresis(u4.state, p, rc, band);
  CHECK(u5.newly_connected.count(make_pair_key(1, 0)) == 1);
}

TEST_CASE("hysteresis rejects band >= range") {
  std::vector<Vec2> p{Vec2(0, 0), Vec2(1, 0)};
  CHECK_THROWS_AS(update_hysteresis({}, p, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("components are sorted and ordered by smallest member") {
  CommHysteresis h;
  h.pair_sigma[{3, 4}] = Link::Connected;
  h.pair_sigma[{0, 4}] = Link::Connected;
  h.pair_sigma[{1, 2}] = Link::Disconnected;
  const auto cs = connected_components(h, 5);
  REQUIRE(cs.components.size() == 3);
  CHECK(cs.components[0] == std::vector<std::size_t>{0, 3, 4});
  CHECK(cs.components[1] == std::vector<std::size_t>{1});
  CHECK(cs.components[2] == std::vector<std::size_t>{2});
  const auto of = cs.component_of(5);
  CHECK(of[3] == 0);
  CHECK(of[2] == 2);
}

TEST_CASE("generator is deterministic and produces valid scenarios") {
  GenParams g;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    g.seed = seed;
    const auto a = generate_scenario(g);
    const auto b = generate_scenario(g);
    CHECK(a == b);
    CHECK(error_of(a).empty());
    CHECK(a.agents.size() == 10);
    CHECK(a.comm_range == doctest::Approx(5 * g.robot_radius));
  }
  g.seed = 1;
  const auto a = generate_scenario(g);
  g.seed = 2;
  CHECK_FALSE(a == generate_scenario(g));
}

TEST_CASE("generator reports an impossible request") {
  GenParams g;
  g.n_agents = 40;
  g.spawn_radius = 2.0;
  g.retry_budget = 2000;
  CHECK_THROWS_AS(generate_scenario(g), GenerationError);
}
