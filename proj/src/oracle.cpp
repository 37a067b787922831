#include "gdm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace gdm {

OracleResult grid_oracle(const CostModel& cost, const Point& start, const Point& goal, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("oracle radius must be positive");
  const OccupancyGrid& grid = cost.grid();
  const Lattice& lat = grid.lattice();
  const auto target_pt = snap_to_free(grid, goal);
  if (!target_pt) return {};
  const int target_cell = index_of(lat, *target_pt);

  // Node 0 is the start; node c + 1 is lattice cell c.
  const int n = lat.size() + 1;
  auto point_of = [&](int node) { return node == 0 ? start : lat.center(node - 1); };
  const int target = target_cell + 1;

  const int reach = static_cast<int>(std::floor(radius / lat.resolution));
  std::vector<Cell> offsets;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (std::hypot(dx, dy) * lat.resolution <= radius) offsets.push_back({dx, dy});
    }

  std::vector<double> dist(n, kInf);
  std::vector<int> prev(n, -1);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[0] = 0.0;
  pq.emplace(0.0, 0);

  auto relax = [&](int u, int v) {
    if (done[v] || !grid.is_free(v - 1)) return;
    const double c = cost.cost(point_of(u), point_of(v));
    if (dist[u] + c < dist[v]) {
      dist[v] = dist[u] + c;
      prev[v] = u;
      pq.emplace(dist[v], v);
    }
  };

  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u] || d > dist[u]) continue;
    done[u] = 1;
    if (u == target) break;
    if (u == 0) {
      for (int c = 0; c < lat.size(); ++c)
        if ((lat.center(c) - start).norm() <= radius) relax(0, c + 1);
      continue;
    }
    const Cell cu = lat.cell(u - 1);
    for (const Cell& o : offsets) {
      const Cell cv{cu.ix + o.ix, cu.iy + o.iy};
      if (lat.contains(cv)) relax(u, lat.index(cv) + 1);
    }
  }

  OracleResult out;
  out.cost = dist[target];
  if (out.cost < kInf) {
    for (int v = target; v >= 0; v = prev[v]) out.path.push_back(point_of(v));
    std::reverse(out.path.begin(), out.path.end());
  }
  return out;
}

}  // namespace gdm
