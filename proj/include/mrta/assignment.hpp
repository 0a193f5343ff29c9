#pragma once

#include "mrta/core.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace mrta {

// Row i = agent, column m = goal. Entries must be finite and non-negative
// when built from distances; the solvers only require finite.
using CostMatrix = Eigen::MatrixXd;

// goal_of[agent] = goal index. Always a bijection onto 0..N-1.
struct Assignment {
  std::vector<std::size_t> goal_of;

  bool is_bijection() const;
  bool operator==(const Assignment&) const = default;
};

struct AssignmentResult {
  std::vector<std::size_t> perm;  // perm[row] = column
  double total_cost = 0.0;
};

CostMatrix cost_matrix(std::span<const Vec2> positions, std::span<const Vec2> candidate_goals);

/// Shortest augmenting path Hungarian method, O(n^3). Among all optimal
/// permutations returns the lexicographically smallest one.
AssignmentResult solve_hungarian(const CostMatrix& c);

inline constexpr std::size_t kBruteForceMaxDim = 8;

/// Exhaustive search over all n! permutations in lexicographic order; the
/// first strict minimum wins. Rejects n > kBruteForceMaxDim.
AssignmentResult brute_force_assign(const CostMatrix& c);

/// Sum of c(i, perm[i]) accumulated in row order.
double permutation_cost(const CostMatrix& c, std::span<const std::size_t> perm);

struct OgaDecision {
  Assignment assignment;
  double old_cost = 0.0;  // component's summed distance-to-go before
  double new_cost = 0.0;  // and after
  bool changed = false;
};

/// Re-permutes the goals owned by `members` so the members' summed distance
/// to goal is minimal. Agents outside the component keep their goals. An
/// already-optimal restriction (ties included) is returned unchanged.
OgaDecision oga_decide_detailed(std::span<const std::size_t> members, const Assignment& current,
                                std::span<const Vec2> positions, std::span<const Vec2> goals);

inline Assignment oga_decide(std::span<const std::size_t> members, const Assignment& current,
                             std::span<const Vec2> positions, std::span<const Vec2> goals) {
  return oga_decide_detailed(members, current, positions, goals).assignment;
}

/// Sum over agents of the distance to the assigned goal.
double total_distance_to_go(std::span<const Vec2> positions, std::span<const Vec2> goals,
                            const Assignment& a);

}  // namespace mrta
