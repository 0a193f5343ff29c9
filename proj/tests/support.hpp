#pragma once

// Shared helpers for the unit tests and the acceptance runner.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/Core>

// 50 significant digits, enough that central differences of W resolve
// gradient entries down to ~1e-30.
using Float50 = boost::multiprecision::cpp_bin_float_50;

namespace Eigen {
template <>
struct NumTraits<Float50> : GenericNumTraits<Float50> {
  enum { IsInteger = 0, IsSigned = 1, IsComplex = 0, RequireInitialization = 1, ReadCost = 8, AddCost = 16, MulCost = 32 };
  static Real epsilon() { return std::numeric_limits<Float50>::epsilon(); }
  static Real dummy_precision() { return Real(1e-40); }
  static int digits10() { return 50; }
};
}  // namespace Eigen

#include "mrta/barrier.hpp"
#include "mrta/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace mrta::testing {

inline Vec2 random_in_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double th = 2.0 * M_PI * u(rng);
  return {r * std::cos(th), r * std::sin(th)};
}

// Agent 0 plus m-1 neighbors, all pairwise farther than 1.2 Delta apart, every
// goal feasible against every other agent's position. Random neighbor velocities.
inline ControlContext<double> random_context(std::mt19937_64& rng, std::size_t m, double delta = 1.0) {
  std::uniform_real_distribution<double> vel(-1.5, 1.5);
  for (;;) {
    std::vector<Vec2> pos, goal;
    while (pos.size() < m) {
      const Vec2 p = random_in_disc(rng, 3.5);
      if (std::all_of(pos.begin(), pos.end(), [&](const Vec2& q) { return distance(p, q) > 1.2 * delta; }))
        pos.push_back(p);
    }
    while (goal.size() < m) {
      const Vec2 g = random_in_disc(rng, 4.0);
      const std::size_t k = goal.size();
      bool ok = std::all_of(goal.begin(), goal.end(), [&](const Vec2& q) { return distance(g, q) > delta; });
      for (std::size_t j = 0; j < m && ok; ++j)
        if (j != k && distance(g, pos[j]) <= 1.2 * delta) ok = false;
      if (ok) goal.push_back(g);
    }
    ControlContext<double> ctx;
    ctx.id = 0;
    ctx.position = pos[0];
    ctx.goal = goal[0];
    ctx.params.min_separation = delta;
    ctx.params.workspace_radius = 10.0;
    ctx.params.aggregation_power = 4.0;
    for (std::size_t j = 1; j < m; ++j) ctx.neighbors.push_back({j, pos[j], goal[j], Vec2(vel(rng), vel(rng))});
    if (distance(ctx.position, ctx.goal) > 0.3) return ctx;
  }
}

template <typename To>
ControlContext<To> cast_context(const ControlContext<double>& c) {
  ControlContext<To> o;
  o.id = c.id;
  o.position = c.position.cast<To>();
  o.goal = c.goal.cast<To>();
  for (const auto& n : c.neighbors) o.neighbors.push_back({n.id, n.position.cast<To>(), n.goal.cast<To>(), n.velocity.cast<To>()});
  const auto& p = c.params;
  o.params.min_separation = To(p.min_separation);
  o.params.workspace_center = p.workspace_center.cast<To>();
  o.params.workspace_radius = To(p.workspace_radius);
  o.params.aggregation_power = To(p.aggregation_power);
  o.params.lr_gain = To(p.lr_gain);
  o.params.q_band = To(p.q_band);
  o.params.grad_floor = To(p.grad_floor);
  o.params.lambda = To(p.lambda);
  o.params.lr_law = p.lr_law;
  o.params.barrier.clamp = p.barrier.clamp;
  o.params.barrier.floor = To(p.barrier.floor);
  return o;
}

struct FdGradients {
  Vec2 own;
  std::vector<Vec2> cross;
};

// Central differences of W_i, evaluated in Float50.
inline FdGradients fd_gradients(const ControlContext<double>& ctx, double step = 1e-6) {
  using F = Float50;
  const F h(step);
  const ControlContext<F> base = cast_context<F>(ctx);
  auto W_at = [](const ControlContext<F>& c) { return eval_barrier(c).W; };
  FdGradients out;
  for (int k = 0; k < 2; ++k) {
    auto plus = base, minus = base;
    plus.position[k] += h;
    minus.position[k] -= h;
    out.own[k] = static_cast<double>((W_at(plus) - W_at(minus)) / (2 * h));
  }
  for (std::size_t j = 0; j < base.neighbors.size(); ++j) {
    Vec2 g;
    for (int k = 0; k < 2; ++k) {
      auto plus = base, minus = base;
      plus.neighbors[j].position[k] += h;
      minus.neighbors[j].position[k] -= h;
      g[k] = static_cast<double>((W_at(plus) - W_at(minus)) / (2 * h));
    }
    out.cross.push_back(g);
  }
  return out;
}

inline double relative_error(const Vec2& a, const Vec2& ref) {
  const double scale = ref.norm();
  return scale > 0.0 ? (a - ref).norm() / scale : a.norm();
}

// Proper intersection of segments p1p2 and q1q2 (shared endpoints or touching
// counts as intersecting).
inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  auto on_seg = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
           p.y() <= std::max(a.y(), b.y());
  };
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_seg(q1, q2, p1)) return true;
  if (d2 == 0 && on_seg(q1, q2, p2)) return true;
  if (d3 == 0 && on_seg(p1, p2, q1)) return true;
  if (d4 == 0 && on_seg(p1, p2, q2)) return true;
  return false;
}

}  // namespace mrta::testing
