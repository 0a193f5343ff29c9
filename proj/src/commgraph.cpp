#include "mrta/commgraph.hpp"

#include <numeric>
#include <stdexcept>

namespace mrta {

Link CommHysteresis::sigma(std::size_t i, std::size_t j) const {
  auto it = pair_sigma.find(make_pair_key(i, j));
  return it == pair_sigma.end() ? Link::Disconnected : it->second;
}

HysteresisUpdate update_hysteresis(const CommHysteresis& prev, std::span<const Vec2> positions,
                                   double comm_range, double comm_band) {
  if (!(comm_band < comm_range)) throw std::invalid_argument("update_hysteresis: need delta_c < R_c");
  HysteresisUpdate out;
  const std::size_t n = positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(positions[i], positions[j]);
      const Link before = prev.sigma(i, j);
      Link after = before;
      if (before == Link::Disconnected && d <= comm_range) {
        after = Link::Connected;
        out.newly_connected.insert({i, j});
      } else if (before == Link::Connected && d > comm_range + comm_band) {
        after = Link::Disconnected;
      }
      out.state.pair_sigma[{i, j}] = after;
    }
  }
  return out;
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

ComponentSet connected_components(const CommHysteresis& h, std::size_t n_agents) {
  DisjointSets ds(n_agents);
  for (const auto& [pair, link] : h.pair_sigma) {
    if (link != Link::Connected) continue;
    if (pair.first >= n_agents || pair.second >= n_agents)
      throw std::out_of_range("connected_components: pair outside agent range");
    ds.unite(pair.first, pair.second);
  }
  ComponentSet out;
  std::vector<std::size_t> slot(n_agents, n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) {
    const std::size_t root = ds.find(i);
    if (slot[root] == n_agents) {
      slot[root] = out.components.size();
      out.components.emplace_back();
    }
    out.components[slot[root]].push_back(i);
  }
  return out;
}

std::vector<std::size_t> ComponentSet::component_of(std::size_t n_agents) const {
  std::vector<std::size_t> idx(n_agents, 0);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (std::size_t a : components[c]) idx.at(a) = c;
  return idx;
}

}  // namespace mrta
