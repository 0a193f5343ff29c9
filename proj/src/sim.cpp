#include "mrta/sim.hpp"

#include "mrta/assignment.hpp"
#include "mrta/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace mrta {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Running: return "RUNNING";
    case Termination::Converged: return "CONVERGED";
    case Termination::Timeout: return "TIMEOUT";
    case Termination::Breach: return "BREACH";
  }
  return "UNKNOWN";
}

double min_pairwise_clearance(std::span<const Vec2> positions, double min_separation) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      best = std::min(best, distance(positions[i], positions[j]) - min_separation);
  return best;
}

SimConfig config_from(const Scenario& s) {
  SimConfig c;
  c.dt = s.dt;
  c.max_time = s.max_time;
  c.lr_cap_length = s.comm_range;
  return c;
}

void validate_config(const SimConfig& c, const Scenario& s) {
  if (!(std::isfinite(c.dt) && c.dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(std::isfinite(c.max_time) && c.max_time > 0.0)) throw ValidationError("max_time must be positive");
  if (!(std::isfinite(c.convergence_tol) && c.convergence_tol > 0.0))
    throw ValidationError("convergence_tol must be positive");
  if (!(std::isfinite(c.lr_cap_length) && c.lr_cap_length >= 0.0))
    throw ValidationError("lr_cap_length must be non-negative");
  if (!(max_lambda(s) * c.dt < 0.5)) throw ValidationError("dt too large: need lambda_max * dt < 0.5");
}

SimState initial_state(const Scenario& s) {
  SimState st;
  st.agents = s.agents;
  return st;
}

double total_distance_to_go(const std::vector<AgentState>& agents, const std::vector<Vec2>& goals) {
  double v = 0.0;
  for (const auto& a : agents) v += distance(a.position, goals[a.goal_index]);
  return v;
}

namespace {

std::vector<Vec2> positions_of(const std::vector<AgentState>& agents) {
  std::vector<Vec2> p;
  p.reserve(agents.size());
  for (const auto& a : agents) p.push_back(a.position);
  return p;
}

Assignment assignment_of(const std::vector<AgentState>& agents) {
  Assignment a;
  for (const auto& s : agents) a.goal_of.push_back(s.goal_index);
  return a;
}

ControlParams<double> params_for(const Scenario& s, const SimConfig& cfg, const AgentState& a) {
  ControlParams<double> p;
  p.min_separation = s.min_separation;
  p.workspace_center = s.workspace_center;
  p.workspace_radius = s.workspace_radius;
  p.aggregation_power = s.aggregation_power;
  p.lr_gain = s.lr_gains[a.id];
  p.q_band = s.q_band;
  p.grad_floor = s.grad_floor;
  p.lambda = a.lambda;
  p.lr_law = cfg.lr_law;
  p.barrier.clamp = true;
  return p;
}

// Closed-loop velocity of one agent at a trial position, everything else frozen.
Vec2 field(ControlContext<double> ctx, const Vec2& at, Mode mode, double cap) {
  ctx.position = at;
  if (mode == Mode::Oga) return oga_control(at, ctx.goal, ctx.params.lambda);
  Vec2 u = lr_control(ctx).u;
  if (cap > 0.0 && u.norm() > cap) u *= cap / u.norm();
  return u;
}

}  // namespace

StepResult step(const SimState& state, const SimConfig& config, const ValidatedScenario& vs) {
  const Scenario& s = vs.get();
  const std::size_t n = state.agents.size();
  const double t = static_cast<double>(state.step_index) * config.dt;

  StepResult res{state, {}};
  auto& next = res.state;
  auto& rep = res.report;
  rep.time = t;
  constexpr std::size_t kLongAgo = std::numeric_limits<std::size_t>::max() / 2;
  next.mode_age.resize(n, kLongAgo);

  // (1) communication hysteresis
  const std::vector<Vec2> pos = positions_of(state.agents);
  auto upd = update_hysteresis(state.links, pos, s.comm_range, s.comm_band);
  next.links = std::move(upd.state);
  for (const auto& pr : upd.newly_connected) rep.triggers.push_back({t, pr});

  // (2) one decision per component that contains a new link
  const ComponentSet comps = connected_components(next.links, n);
  const auto comp_of = comps.component_of(n);
  std::set<std::size_t> deciding;
  for (const auto& pr : upd.newly_connected) deciding.insert(comp_of[pr.first]);
  Assignment assignment = assignment_of(state.agents);
  for (std::size_t c : deciding) {
    const auto& members = comps.components[c];
    const OgaDecision d = oga_decide_detailed(members, assignment, pos, s.goals);
    assignment = d.assignment;
    for (std::size_t i = 0; i < n; ++i) next.agents[i].goal_index = assignment.goal_of[i];
    rep.decisions.push_back({t, members, assignment, d.old_cost, d.new_cost, d.changed,
                             total_distance_to_go(next.agents, s.goals)});
  }

  // (3) per-agent supervisors, all reading the pre-step snapshot
  rep.modes.resize(n);
  rep.q.assign(n, 0.0);
  rep.W.assign(n, 0.0);
  std::vector<Vec2> u(n, Vec2::Zero());
  std::vector<ControlContext<double>> contexts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = next.agents[i];
    auto& ctx = contexts[i];
    ctx.id = i;
    ctx.position = a.position;
    ctx.goal = s.goals[a.goal_index];
    ctx.params = params_for(s, config, a);
    for (std::size_t j : comps.components[comp_of[i]]) {
      if (j == i) continue;
      const AgentState& b = next.agents[j];
      const Vec2 gj = s.goals[b.goal_index];
      // A neighbor whose goal was just reassigned has no command for it yet.
      const bool retargeted = b.goal_index != state.agents[j].goal_index;
      const Vec2 vj = config.neighbor_velocity == NeighborVelocity::PreviousCommand && !retargeted
                          ? b.last_velocity
                          : oga_control(b.position, gj, b.lambda);
      ctx.neighbors.push_back({j, b.position, gj, vj});
    }
    const auto sup = supervise(ctx, config.supervisor_enabled ? a.mode : Mode::Oga);
    Mode mode = config.supervisor_enabled ? sup.mode : Mode::Oga;
    u[i] = mode == sup.mode ? sup.u : oga_control(a.position, ctx.goal, a.lambda);
    // Minimum dwell: LR is kept for min_dwell_steps, and left only when W_i is
    // also predicted to fall one step ahead and if the neighbors dropped to OGA.
    // OGA is kept for min_oga_dwell_steps, so re-entering LR may lag by at most
    // that many steps minus one.
    const std::size_t age = i < state.mode_age.size() ? state.mode_age[i] : kLongAgo;
    if (config.supervisor_enabled && a.mode == Mode::Lr && mode == Mode::Oga) {
      bool hold = age < config.min_dwell_steps;
      if (!hold) {
        auto alt = ctx;
        for (auto& nb : alt.neighbors) nb.velocity = oga_control(nb.position, nb.goal, next.agents[nb.id].lambda);
        hold = supervise(alt, Mode::Lr).mode == Mode::Lr;
      }
      if (!hold) {
        auto ahead = ctx;
        ahead.position += config.dt * u[i];
        for (auto& nb : ahead.neighbors) nb.position += config.dt * nb.velocity;
        hold = supervise(ahead, Mode::Lr).mode == Mode::Lr;
      }
      if (hold) {
        mode = Mode::Lr;
        u[i] = lr_control(ctx).u;
      }
    } else if (config.supervisor_enabled && a.mode == Mode::Oga && mode == Mode::Lr &&
               age < config.min_oga_dwell_steps) {
      mode = Mode::Oga;
      u[i] = oga_control(a.position, ctx.goal, a.lambda);
      rep.flags.push_back({t, i, StepFlag::LrEntryDelayed});
    }
    next.mode_age[i] = mode != a.mode ? 1 : age + 1;
    if (mode == Mode::Lr && config.lr_cap_length > 0.0) {
      const double cap = a.lambda * config.lr_cap_length;
      const double speed = u[i].norm();
      if (speed > cap) {
        u[i] *= cap / speed;
        rep.flags.push_back({t, i, StepFlag::LrSaturated});
      }
    }
    rep.modes[i] = mode;
    rep.q[i] = sup.q;
    rep.W[i] = sup.W;
    if (sup.clamped) rep.flags.push_back({t, i, StepFlag::BarrierClamped});
    if (sup.degenerate && mode == Mode::Lr) rep.flags.push_back({t, i, StepFlag::DegenerateLr});
  }

  // (4) integrate, (5) keep the applied command for the neighbors' next step
  const double dt = config.dt;
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& a = next.agents[i];
    Vec2 applied = u[i];
    if (config.integrator == Integrator::Rk4FrozenInputs) {
      const Vec2 k1 = u[i];
      const double cap = a.lambda * config.lr_cap_length;
      const Vec2 k2 = field(contexts[i], a.position + 0.5 * dt * k1, rep.modes[i], cap);
      const Vec2 k3 = field(contexts[i], a.position + 0.5 * dt * k2, rep.modes[i], cap);
      const Vec2 k4 = field(contexts[i], a.position + dt * k3, rep.modes[i], cap);
      applied = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    a.mode = rep.modes[i];
    a.position += dt * applied;
    a.last_velocity = applied;
  }
  next.step_index = state.step_index + 1;

  // (6) report and safety check
  const std::vector<Vec2> after = positions_of(next.agents);
  rep.min_clearance = min_pairwise_clearance(after, s.min_separation);
  rep.total_v = total_distance_to_go(next.agents, s.goals);

  for (std::size_t i = 0; i < n; ++i) {
    if (!is_finite(after[i]))
      throw SafetyBreach("collision/boundary breach: agent " + std::to_string(i) + " state is not finite", res);
    if (!(workspace_constraint(after[i], s.workspace_center, s.workspace_radius) > 0.0))
      throw SafetyBreach("collision/boundary breach: agent " + std::to_string(i) + " left the workspace", res);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(pair_constraint(after[i], after[j], s.min_separation) > 0.0))
        throw SafetyBreach("collision/boundary breach: agents " + std::to_string(i) + " and " + std::to_string(j) +
                               " within Delta",
                           res);
  return res;
}

namespace {

void append_record(SimTrace& tr, double time, const std::vector<AgentState>& agents, const StepReport* rep,
                   const Scenario& s) {
  tr.times.push_back(time);
  tr.states.push_back(agents);
  const std::size_t n = agents.size();
  tr.q.push_back(rep ? rep->q : std::vector<double>(n, 0.0));
  tr.W.push_back(rep ? rep->W : std::vector<double>(n, 0.0));
  tr.lyapunov_total.push_back(total_distance_to_go(agents, s.goals));
  tr.min_clearance.push_back(min_pairwise_clearance(positions_of(agents), s.min_separation));
}

void absorb(SimTrace& tr, const StepReport& rep, const std::vector<AgentState>& before) {
  for (const auto& e : rep.triggers) tr.triggers.push_back(e);
  for (const auto& d : rep.decisions) tr.assignments.push_back(d);
  for (const auto& f : rep.flags) tr.flags.push_back(f);
  for (std::size_t i = 0; i < rep.modes.size(); ++i)
    if (rep.modes[i] != before[i].mode) tr.mode_switches.push_back({rep.time, i, rep.modes[i]});
}

bool converged(const std::vector<AgentState>& agents, const std::vector<Vec2>& goals, double tol) {
  return std::all_of(agents.begin(), agents.end(),
                     [&](const AgentState& a) { return distance(a.position, goals[a.goal_index]) <= tol; });
}

}  // namespace

SimTrace run(const ValidatedScenario& vs, const SimConfig& config) {
  const Scenario& s = vs.get();
  validate_config(config, s);

  SimTrace tr;
  tr.seed = config.seed;
  tr.min_separation = s.min_separation;
  SimState st = initial_state(s);
  append_record(tr, 0.0, st.agents, nullptr, s);

  const auto max_steps = static_cast<std::size_t>(std::llround(config.max_time / config.dt));
  while (true) {
    if (converged(st.agents, s.goals, config.convergence_tol)) {
      tr.termination = Termination::Converged;
      break;
    }
    if (st.step_index >= max_steps) {
      tr.termination = Termination::Timeout;
      tr.termination_detail = "max_time reached";
      break;
    }
    try {
      StepResult r = step(st, config, vs);
      absorb(tr, r.report, st.agents);
      append_record(tr, static_cast<double>(r.state.step_index) * config.dt, r.state.agents, &r.report, s);
      st = std::move(r.state);
    } catch (const SafetyBreach& b) {
      const auto& r = b.result();
      absorb(tr, r.report, st.agents);
      append_record(tr, static_cast<double>(r.state.step_index) * config.dt, r.state.agents, &r.report, s);
      tr.termination = Termination::Breach;
      tr.termination_detail = b.what();
      break;
    }
  }
  return tr;
}

Metrics metrics(const SimTrace& tr) {
  Metrics m;
  if (tr.size() == 0) throw std::invalid_argument("metrics: empty trace");
  const std::size_t n = tr.states.front().size();

  for (std::size_t k = 1; k < tr.size(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      m.total_path_length += distance(tr.states[k][i].position, tr.states[k - 1][i].position);

  std::size_t lr_steps = 0;
  for (std::size_t k = 1; k < tr.size(); ++k)
    if (std::any_of(tr.states[k].begin(), tr.states[k].end(), [](const AgentState& a) { return a.mode == Mode::Lr; }))
      ++lr_steps;
  m.lr_fraction = tr.size() > 1 ? static_cast<double>(lr_steps) / static_cast<double>(tr.size() - 1) : 0.0;

  m.decision_count = tr.assignments.size();
  m.min_clearance = *std::min_element(tr.min_clearance.begin(), tr.min_clearance.end());

  // Per agent: instants at which its mode or its goal changed.
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> when;
    for (std::size_t k = 1; k < tr.size(); ++k) {
      const auto& a = tr.states[k][i];
      const auto& b = tr.states[k - 1][i];
      if (a.mode != b.mode || a.goal_index != b.goal_index) when.push_back(tr.times[k - 1]);
    }
    for (std::size_t k = 1; k < when.size(); ++k) m.switch_intervals.push_back(when[k] - when[k - 1]);
  }
  return m;
}

}  // namespace mrta
