#include "mrta/assignment.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mrta {

bool Assignment::is_bijection() const {
  std::vector<bool> seen(goal_of.size(), false);
  for (std::size_t g : goal_of) {
    if (g >= goal_of.size() || seen[g]) return false;
    seen[g] = true;
  }
  return true;
}

CostMatrix cost_matrix(std::span<const Vec2> positions, std::span<const Vec2> candidate_goals) {
  if (positions.size() != candidate_goals.size())
    throw std::invalid_argument("cost_matrix: positions and goals differ in length");
  const auto n = static_cast<Eigen::Index>(positions.size());
  CostMatrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index m = 0; m < n; ++m)
      c(i, m) = distance(positions[static_cast<std::size_t>(i)], candidate_goals[static_cast<std::size_t>(m)]);
  return c;
}

double permutation_cost(const CostMatrix& c, std::span<const std::size_t> perm) {
  double s = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    s += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
  return s;
}

namespace {

void check_input(const CostMatrix& c, const char* who) {
  if (c.rows() != c.cols()) throw std::invalid_argument(std::string(who) + ": cost matrix must be square");
  if (!c.allFinite()) throw std::invalid_argument(std::string(who) + ": cost matrix entries must be finite");
}

// Given a perfect matching inside the equality subgraph, walk rows in order
// and move each row onto its smallest admissible column, re-routing the
// displaced rows along alternating paths through rows not yet fixed.
void lexicographic_minimize(const std::vector<std::vector<bool>>& tight, std::vector<std::size_t>& row_to_col) {
  const std::size_t n = row_to_col.size();
  std::vector<std::size_t> col_to_row(n);
  for (std::size_t r = 0; r < n; ++r) col_to_row[row_to_col[r]] = r;

  std::vector<std::size_t> prev_row(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t target = row_to_col[i];  // column freed if row i moves
    for (std::size_t j = 0; j < target; ++j) {
      if (!tight[i][j]) continue;
      const std::size_t start = col_to_row[j];
      if (start < i) continue;  // owned by a fixed row

      // BFS over unfixed rows; row r may take any tight column except j whose
      // owner is unfixed, or the freed column `target`.
      std::vector<bool> visited(n, false);
      std::deque<std::size_t> queue{start};
      visited[start] = true;
      std::size_t end_row = n;
      while (!queue.empty() && end_row == n) {
        const std::size_t r = queue.front();
        queue.pop_front();
        for (std::size_t c = 0; c < n; ++c) {
          if (!tight[r][c] || c == j || c == row_to_col[r]) continue;
          if (c == target) {
            end_row = r;
            break;
          }
          const std::size_t owner = col_to_row[c];
          if (owner <= i || visited[owner]) continue;
          visited[owner] = true;
          prev_row[owner] = r;
          queue.push_back(owner);
        }
      }
      if (end_row == n) continue;

      // end_row takes the freed column; each predecessor takes the column its
      // successor held.
      std::size_t r = end_row;
      std::size_t c = target;
      while (true) {
        const std::size_t released = row_to_col[r];
        row_to_col[r] = c;
        col_to_row[c] = r;
        if (r == start) break;
        c = released;
        r = prev_row[r];
      }
      row_to_col[i] = j;
      col_to_row[j] = i;
      break;
    }
  }
}

}  // namespace

AssignmentResult solve_hungarian(const CostMatrix& c) {
  check_input(c, "solve_hungarian");
  const std::size_t n = static_cast<std::size_t>(c.rows());
  AssignmentResult out;
  if (n == 0) return out;

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual start of each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  const auto a = [&c](std::size_t i, std::size_t j) {
    return c(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
  };

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[owner[j] - 1] = j - 1;

  // Equality subgraph of the optimal dual; every optimal permutation lives in it.
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) * scale;
  std::vector<std::vector<bool>> tight(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      tight[i][j] = (a(i + 1, j + 1) - u[i + 1] - v[j + 1]) <= tol;
  for (std::size_t i = 0; i < n; ++i) tight[i][row_to_col[i]] = true;

  lexicographic_minimize(tight, row_to_col);

  out.total_cost = permutation_cost(c, row_to_col);
  out.perm = std::move(row_to_col);
  return out;
}

AssignmentResult brute_force_assign(const CostMatrix& c) {
  check_input(c, "brute_force_assign");
  const std::size_t n = static_cast<std::size_t>(c.rows());
  if (n > kBruteForceMaxDim)
    throw std::invalid_argument("brute_force_assign: dimension " + std::to_string(n) + " exceeds limit " +
                                std::to_string(kBruteForceMaxDim));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  AssignmentResult best{perm, permutation_cost(c, perm)};
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double cost = permutation_cost(c, perm);
    if (cost < best.total_cost) best = {perm, cost};
  }
  return best;
}

double total_distance_to_go(std::span<const Vec2> positions, std::span<const Vec2> goals, const Assignment& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) s += distance(positions[i], goals[a.goal_of.at(i)]);
  return s;
}

OgaDecision oga_decide_detailed(std::span<const std::size_t> members, const Assignment& current,
                                std::span<const Vec2> positions, std::span<const Vec2> goals) {
  OgaDecision out{current, 0.0, 0.0, false};
  if (members.empty()) return out;

  std::vector<std::size_t> rows(members.begin(), members.end());
  std::sort(rows.begin(), rows.end());
  std::vector<Vec2> member_pos;
  std::vector<Vec2> owned_goals;
  std::vector<std::size_t> owned_idx;
  for (std::size_t a : rows) {
    const std::size_t g = current.goal_of.at(a);
    member_pos.push_back(positions[a]);
    owned_goals.push_back(goals[g]);
    owned_idx.push_back(g);
  }

  const CostMatrix c = cost_matrix(member_pos, owned_goals);
  std::vector<std::size_t> identity(rows.size());
  std::iota(identity.begin(), identity.end(), 0);
  out.old_cost = permutation_cost(c, identity);
  out.new_cost = out.old_cost;
  if (rows.size() == 1) return out;

  const AssignmentResult best = solve_hungarian(c);
  if (!(best.total_cost < out.old_cost)) return out;

  for (std::size_t r = 0; r < rows.size(); ++r) out.assignment.goal_of[rows[r]] = owned_idx[best.perm[r]];
  out.new_cost = best.total_cost;
  out.changed = out.assignment != current;
  return out;
}

}  // namespace mrta
