#include "gdm/rrt_star.hpp"

#include <algorithm>
#include <cmath>

namespace gdm {

Trajectory rrt_star(const OccupancyGrid& grid, const Point& start, const Point& goal, const RrtConfig& cfg,
                    std::mt19937_64& rng) {
  if (cfg.iterations < 1 || !(cfg.step > 0.0)) throw PreconditionError("invalid RRT* configuration");
  const KnownFreeSet free = known_free(grid);
  if (free.empty()) throw NoTrajectoryError("no known-free space");
  if (!grid.is_free(goal)) throw NoTrajectoryError("goal is not in known-free space");
  const CostModel cost = CostModel::euclidean(grid, 1.0);
  const Lattice& lat = grid.lattice();
  const double gamma = cfg.gamma_scale * rgg_gamma(free.lebesgue_measure, 2);

  std::vector<Point> pts{start};
  std::vector<int> parent{-1};
  std::vector<double> g{0.0};
  std::vector<std::vector<int>> children{{}};
  std::vector<int> stack;
  int goal_node = -1;

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_cell(0, free.size() - 1);
  const double goal_tol = lat.resolution;

  for (int it = 0; it < cfg.iterations; ++it) {
    Point sample;
    if (uni(rng) < cfg.goal_bias) {
      sample = goal;
    } else {
      const Point c = lat.center(free.cells[pick_cell(rng)]);
      sample = c + Point((uni(rng) - 0.5) * lat.resolution, (uni(rng) - 0.5) * lat.resolution);
    }

    int nearest = 0;
    double best_d2 = kInf;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      const double d2 = (pts[i] - sample).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        nearest = i;
      }
    }
    const double d = std::sqrt(best_d2);
    if (d < 1e-9) continue;
    const Point x_new = d <= cfg.step ? sample : Point(pts[nearest] + (cfg.step / d) * (sample - pts[nearest]));
    if (!(cost.cost(pts[nearest], x_new) < kInf)) continue;

    const double n = static_cast<double>(pts.size() + 1);
    const double r = std::min(cfg.step, gamma * std::sqrt(std::log(n) / n));
    std::vector<int> near;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
      if ((pts[i] - x_new).squaredNorm() <= r * r) near.push_back(i);

    int best_parent = nearest;
    double best_g = g[nearest] + cost.cost(pts[nearest], x_new);
    std::vector<double> near_cost(near.size(), kInf);
    for (std::size_t k = 0; k < near.size(); ++k) {
      near_cost[k] = cost.cost(pts[near[k]], x_new);
      if (g[near[k]] + near_cost[k] < best_g) {
        best_g = g[near[k]] + near_cost[k];
        best_parent = near[k];
      }
    }
    const int id = static_cast<int>(pts.size());
    pts.push_back(x_new);
    parent.push_back(best_parent);
    g.push_back(best_g);
    children.emplace_back();
    children[best_parent].push_back(id);

    for (std::size_t k = 0; k < near.size(); ++k) {
      const int i = near[k];
      if (i == best_parent || !(near_cost[k] < kInf)) continue;
      if (best_g + near_cost[k] < g[i]) {
        const double delta = best_g + near_cost[k] - g[i];
        auto& sib = children[parent[i]];
        sib.erase(std::find(sib.begin(), sib.end(), i));
        parent[i] = id;
        children[id].push_back(i);
        stack.assign(1, i);
        while (!stack.empty()) {
          const int u = stack.back();
          stack.pop_back();
          g[u] += delta;
          stack.insert(stack.end(), children[u].begin(), children[u].end());
        }
      }
    }

    if ((x_new - goal).norm() <= goal_tol && (goal_node < 0 || best_g < g[goal_node])) goal_node = id;
  }

  if (goal_node < 0) throw NoTrajectoryError("RRT* did not reach the goal");
  Trajectory traj;
  for (int u = goal_node; u >= 0; u = parent[u]) traj.vertices.push_back(u);
  std::reverse(traj.vertices.begin(), traj.vertices.end());
  for (int v : traj.vertices) traj.waypoints.push_back(pts[v]);
  traj.cost = 0.0;
  for (std::size_t i = 1; i < traj.waypoints.size(); ++i)
    traj.cost += cost.cost(traj.waypoints[i - 1], traj.waypoints[i]);
  return traj;
}

Trajectory rrt_star_frontier_baseline(const Point& start, std::span<const Frontier> occ_frontiers,
                                      const OccupancyGrid& grid, std::mt19937_64& rng, const RrtConfig& cfg) {
  if (occ_frontiers.empty()) throw PreconditionError("baseline needs at least one occupancy frontier");
  for (std::size_t i : sample_without_replacement(occ_frontiers.size(), occ_frontiers.size(), rng)) {
    try {
      Trajectory t = rrt_star(grid, start, occ_frontiers[i].centroid, cfg, rng);
      t.frontier_id = occ_frontiers[i].id;
      t.kind = FrontierKind::Occupancy;
      t.goal = static_cast<int>(i);
      return t;
    } catch (const NoTrajectoryError&) {
    }
  }
  throw NoTrajectoryError("RRT* failed for every occupancy frontier");
}

}  // namespace gdm
