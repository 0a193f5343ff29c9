#pragma once

// Recentered logarithmic barriers and the aggregated per-agent Lyapunov-like
// function W_i = w_i / (1 + w_i), with exact gradients with respect to the
// agent's own position and every neighbor position.

#include "mrta/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mrta {

class BarrierDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// c_ij = |r_i - r_j|^2 - Delta^2, positive while the pair is separated.
template <typename Scalar>
Scalar pair_constraint(const Vec2T<Scalar>& ri, const Vec2T<Scalar>& rj, Scalar delta) {
  return (ri - rj).squaredNorm() - delta * delta;
}

/// c_i0 = R_0^2 - |r_i - r_0|^2, positive strictly inside the workspace disc.
template <typename Scalar>
Scalar workspace_constraint(const Vec2T<Scalar>& ri, const Vec2T<Scalar>& r0, Scalar radius) {
  return radius * radius - (ri - r0).squaredNorm();
}

template <typename Scalar>
struct BarrierOptions {
  // When set, constraint values at evaluation points are floored instead of
  // raising BarrierDomainError.
  bool clamp = false;
  Scalar floor = Scalar(1e-12);
};

namespace detail {

template <typename Scalar>
Scalar checked_constraint(Scalar c, const BarrierOptions<Scalar>& opt, bool& clamped, const char* what) {
  if (!opt.clamp) {
    if (!(c > Scalar(0))) throw BarrierDomainError(what);
    return c;
  }
  if (c >= opt.floor) return c;
  clamped = true;
  return opt.floor;
}

// Value and gradients of one recentered pair barrier r_ij(r_i, r_j; g).
template <typename Scalar>
struct PairTerm {
  Scalar value;
  Vec2T<Scalar> d_own;
  Vec2T<Scalar> d_other;
};

template <typename Scalar>
PairTerm<Scalar> pair_term(const Vec2T<Scalar>& ri, const Vec2T<Scalar>& rj, const Vec2T<Scalar>& goal,
                           Scalar delta, const BarrierOptions<Scalar>& opt, bool& clamped) {
  using std::log;
  const Vec2T<Scalar> e = ri - rj;
  const Vec2T<Scalar> eg = goal - rj;
  const Scalar c = checked_constraint(pair_constraint(ri, rj, delta), opt, clamped,
                                      "pair constraint non-positive at agent position");
  const Scalar cg = checked_constraint(pair_constraint(goal, rj, delta), opt, clamped,
                                       "pair constraint non-positive at goal position");
  const Vec2T<Scalar> step = ri - goal;
  const Vec2T<Scalar> grad_at_goal = Scalar(-2) * eg / cg;  // d b / d r_i at r_i = goal

  PairTerm<Scalar> t;
  t.value = -log(c) + log(cg) - grad_at_goal.dot(step);
  t.d_own = Scalar(-2) * e / c - grad_at_goal;
  // d/d r_j of [b(r_i,r_j) - b(g,r_j) - grad_b(g,r_j) . (r_i - g)]
  t.d_other = Scalar(2) * e / c - Scalar(2) * eg / cg - Scalar(2) * step / cg +
              Scalar(4) * eg * eg.dot(step) / (cg * cg);
  return t;
}

template <typename Scalar>
struct WorkspaceTerm {
  Scalar value;
  Vec2T<Scalar> d_own;
};

template <typename Scalar>
WorkspaceTerm<Scalar> workspace_term(const Vec2T<Scalar>& ri, const Vec2T<Scalar>& center, Scalar radius,
                                     const Vec2T<Scalar>& goal, const BarrierOptions<Scalar>& opt, bool& clamped) {
  using std::log;
  const Scalar c = checked_constraint(workspace_constraint(ri, center, radius), opt, clamped,
                                      "workspace constraint non-positive at agent position");
  const Scalar cg = checked_constraint(workspace_constraint(goal, center, radius), opt, clamped,
                                       "workspace constraint non-positive at goal position");
  const Vec2T<Scalar> grad_at_goal = Scalar(2) * (goal - center) / cg;
  WorkspaceTerm<Scalar> t;
  t.value = -log(c) + log(cg) - grad_at_goal.dot(ri - goal);
  t.d_own = Scalar(2) * (ri - center) / c - grad_at_goal;
  return t;
}

}  // namespace detail

/// r_ij = b(r_i, r_j) - b(g, r_j) - grad b|_g . (r_i - g) with b = -ln c_ij.
template <typename Scalar>
Scalar recentered_pair_barrier(const Vec2T<Scalar>& ri, const Vec2T<Scalar>& rj, const Vec2T<Scalar>& goal,
                               Scalar delta) {
  bool clamped = false;
  return detail::pair_term(ri, rj, goal, delta, BarrierOptions<Scalar>{}, clamped).value;
}

template <typename Scalar>
Scalar recentered_workspace_barrier(const Vec2T<Scalar>& ri, const Vec2T<Scalar>& center, Scalar radius,
                                    const Vec2T<Scalar>& goal) {
  bool clamped = false;
  return detail::workspace_term(ri, center, radius, goal, BarrierOptions<Scalar>{}, clamped).value;
}

enum class LrLaw {
  Componentwise,  // per-axis division by the own-gradient component
  Projected,      // cross compensation along the own gradient direction
  NearestToOga,   // OGA command corrected along the own gradient only as far as needed
};

enum class NeighborVelocity {
  PreviousCommand,  // neighbors' commands from the previous step
  OgaCommand,       // neighbors' current OGA feedback
};

template <typename Scalar>
struct ControlParams {
  Scalar min_separation = 1;
  Vec2T<Scalar> workspace_center = Vec2T<Scalar>::Zero();
  Scalar workspace_radius = 10;
  Scalar aggregation_power = 4;
  Scalar lr_gain = 1;
  Scalar q_band = Scalar(1e-3);
  Scalar grad_floor = Scalar(1e-8);
  Scalar lambda = 1;
  LrLaw lr_law = LrLaw::Componentwise;
  BarrierOptions<Scalar> barrier{};
};

template <typename Scalar>
struct Neighbor {
  std::size_t id = 0;
  Vec2T<Scalar> position = Vec2T<Scalar>::Zero();
  Vec2T<Scalar> goal = Vec2T<Scalar>::Zero();
  Vec2T<Scalar> velocity = Vec2T<Scalar>::Zero();  // u_j used in the W_i rate
};

template <typename Scalar>
struct ControlContext {
  std::size_t id = 0;
  Vec2T<Scalar> position = Vec2T<Scalar>::Zero();
  Vec2T<Scalar> goal = Vec2T<Scalar>::Zero();
  std::vector<Neighbor<Scalar>> neighbors;  // connected component minus self
  ControlParams<Scalar> params{};
};

template <typename Scalar>
struct BarrierEvaluation {
  Scalar W = 0;
  Vec2T<Scalar> zeta_own = Vec2T<Scalar>::Zero();
  std::vector<Vec2T<Scalar>> zeta_cross;  // aligned with ControlContext::neighbors
  bool clamped = false;
};

/// Aggregates w_i = (w_i0^d + sum_j w_ij^d)^(1/d) with w = r^2, maps it to
/// W_i = w_i / (1 + w_i) and differentiates the whole composite analytically.
template <typename Scalar>
BarrierEvaluation<Scalar> eval_barrier(const ControlContext<Scalar>& ctx) {
  using std::pow;
  const auto& p = ctx.params;
  BarrierEvaluation<Scalar> out;
  out.zeta_cross.assign(ctx.neighbors.size(), Vec2T<Scalar>::Zero());

  const std::size_t m = ctx.neighbors.size();
  std::vector<Scalar> w(m + 1);
  std::vector<Vec2T<Scalar>> dw_own(m + 1);
  std::vector<Vec2T<Scalar>> dw_other(m);

  const auto ws = detail::workspace_term(ctx.position, p.workspace_center, p.workspace_radius, ctx.goal, p.barrier,
                                         out.clamped);
  w[0] = ws.value * ws.value;
  dw_own[0] = Scalar(2) * ws.value * ws.d_own;
  for (std::size_t k = 0; k < m; ++k) {
    const auto t = detail::pair_term(ctx.position, ctx.neighbors[k].position, ctx.goal, p.min_separation,
                                     p.barrier, out.clamped);
    w[k + 1] = t.value * t.value;
    dw_own[k + 1] = Scalar(2) * t.value * t.d_own;
    dw_other[k] = Scalar(2) * t.value * t.d_other;
  }

  const Scalar wmax = *std::max_element(w.begin(), w.end());
  if (!(wmax > Scalar(0))) return out;  // at the goal: W = 0, zero gradients

  // Scaled by the largest term so large exponents cannot overflow.
  const Scalar d = p.aggregation_power;
  Scalar sum = 0;
  for (Scalar wk : w) sum += pow(wk / wmax, d);
  const Scalar agg = wmax * pow(sum, Scalar(1) / d);
  const Scalar outer = pow(sum, Scalar(1) / d - Scalar(1));
  const Scalar dW_dw = Scalar(1) / ((Scalar(1) + agg) * (Scalar(1) + agg));

  out.W = agg / (Scalar(1) + agg);
  for (std::size_t k = 0; k <= m; ++k) {
    const Scalar weight = dW_dw * outer * pow(w[k] / wmax, d - Scalar(1));
    out.zeta_own += weight * dw_own[k];
    if (k > 0) out.zeta_cross[k - 1] = weight * dw_other[k - 1];
  }
  return out;
}

}  // namespace mrta
