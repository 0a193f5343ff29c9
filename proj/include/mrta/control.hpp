#pragma once

#include "mrta/barrier.hpp"
#include "mrta/core.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace mrta {

/// u = -lambda (r - g)
template <typename Scalar>
Vec2T<Scalar> oga_control(const Vec2T<Scalar>& pos, const Vec2T<Scalar>& goal, Scalar lambda) {
  return -lambda * (pos - goal);
}

/// Rate of W_i for candidate commands: zeta_i . u_self + sum_j zeta_ij . u_j.
template <typename Scalar>
Scalar q_surface(const BarrierEvaluation<Scalar>& ev, const Vec2T<Scalar>& u_self,
                 std::span<const Vec2T<Scalar>> u_neighbors) {
  Scalar q = ev.zeta_own.dot(u_self);
  for (std::size_t k = 0; k < ev.zeta_cross.size(); ++k) q += ev.zeta_cross[k].dot(u_neighbors[k]);
  return q;
}

template <typename Scalar>
std::vector<Vec2T<Scalar>> neighbor_velocities(const ControlContext<Scalar>& ctx) {
  std::vector<Vec2T<Scalar>> u;
  u.reserve(ctx.neighbors.size());
  for (const auto& n : ctx.neighbors) u.push_back(n.velocity);
  return u;
}

template <typename Scalar>
Scalar q_surface(const ControlContext<Scalar>& ctx, const Vec2T<Scalar>& u_self,
                 std::span<const Vec2T<Scalar>> u_neighbors) {
  return q_surface(eval_barrier(ctx), u_self, u_neighbors);
}

template <typename Scalar>
struct LrCommand {
  Vec2T<Scalar> u = Vec2T<Scalar>::Zero();
  bool degenerate = false;  // fell back to pure descent
};

/// Last-resort law. Cancels the neighbors' contribution to the W_i rate and
/// descends W_i with gain k_i, so that the rate equals -k_i |zeta_i|^2.
template <typename Scalar>
LrCommand<Scalar> lr_control(const ControlContext<Scalar>& ctx, const BarrierEvaluation<Scalar>& ev) {
  using std::abs;
  const auto& p = ctx.params;
  const Vec2T<Scalar>& z = ev.zeta_own;
  LrCommand<Scalar> out;

  Vec2T<Scalar> cross = Vec2T<Scalar>::Zero();  // per-axis sum_j dW/dx_j u_jx
  for (std::size_t k = 0; k < ev.zeta_cross.size(); ++k)
    cross += ev.zeta_cross[k].cwiseProduct(ctx.neighbors[k].velocity);
  const bool has_cross = cross.x() != Scalar(0) || cross.y() != Scalar(0);
  const Vec2T<Scalar> descent = -p.lr_gain * z;

  if (p.lr_law == LrLaw::NearestToOga) {
    const Scalar zz = z.squaredNorm();
    if (zz < p.grad_floor * p.grad_floor) {
      out.u = descent;
      out.degenerate = has_cross;
      return out;
    }
    const Vec2T<Scalar> u0 = oga_control(ctx.position, ctx.goal, p.lambda);
    out.u = u0 - z * (z.dot(u0) + cross.x() + cross.y() + p.lr_gain * zz) / zz;
    return out;
  }
  if (p.lr_law == LrLaw::Projected) {
    const Scalar zz = z.squaredNorm();
    if (zz < p.grad_floor * p.grad_floor) {
      out.u = descent;
      out.degenerate = has_cross;
      return out;
    }
    out.u = descent - z * (cross.x() + cross.y()) / zz;
    return out;
  }

  const bool x_small = abs(z.x()) < p.grad_floor;
  const bool y_small = abs(z.y()) < p.grad_floor;
  if (x_small && y_small) {
    out.u = descent;
    out.degenerate = has_cross;
    return out;
  }
  const auto floored = [&](Scalar d) {
    const Scalar mag = std::max(abs(d), p.grad_floor);
    return d < Scalar(0) ? -mag : mag;
  };
  out.u.x() = descent.x() - cross.x() / floored(z.x());
  out.u.y() = descent.y() - cross.y() / floored(z.y());
  return out;
}

template <typename Scalar>
LrCommand<Scalar> lr_control(const ControlContext<Scalar>& ctx) {
  return lr_control(ctx, eval_barrier(ctx));
}

template <typename Scalar>
struct SupervisorOutput {
  Mode mode = Mode::Oga;
  Vec2T<Scalar> u = Vec2T<Scalar>::Zero();
  Scalar q = 0;  // surface value under the OGA command
  Scalar W = 0;
  bool degenerate = false;
  bool clamped = false;
};

/// Hysteresis switch between the OGA command and the LR command on the sign
/// of the W_i rate under OGA, with a dead band of +-epsilon_Q.
template <typename Scalar>
SupervisorOutput<Scalar> supervise(const ControlContext<Scalar>& ctx, Mode prev_mode) {
  SupervisorOutput<Scalar> out;
  const Vec2T<Scalar> u_oga = oga_control(ctx.position, ctx.goal, ctx.params.lambda);
  if (ctx.neighbors.empty()) {
    out.u = u_oga;
    return out;
  }
  const auto ev = eval_barrier(ctx);
  const auto u_nb = neighbor_velocities(ctx);
  out.q = q_surface(ev, u_oga, std::span<const Vec2T<Scalar>>(u_nb));
  out.W = ev.W;
  out.clamped = ev.clamped;

  const Scalar band = ctx.params.q_band;
  out.mode = prev_mode;
  if (prev_mode == Mode::Oga && out.q >= band) out.mode = Mode::Lr;
  if (prev_mode == Mode::Lr && out.q <= -band) out.mode = Mode::Oga;

  if (out.mode == Mode::Oga) {
    out.u = u_oga;
  } else {
    const auto lr = lr_control(ctx, ev);
    out.u = lr.u;
    out.degenerate = lr.degenerate;
  }
  return out;
}

}  // namespace mrta
