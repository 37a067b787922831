#pragma once

#include "gdm/frontier.hpp"
#include "gdm/grid.hpp"
#include "gdm/planner.hpp"

#include <random>
#include <span>

namespace gdm {

struct RrtConfig {
  int iterations = 2000;
  double step = 0.5;        // steering distance (m)
  double goal_bias = 0.05;  // probability of sampling the goal
  double gamma_scale = 1.1;
};

/// RRT* with distance cost on the known-free cells of `grid`. Samples are
/// uniform over known-free space. Throws NoTrajectoryError if the goal was
/// not connected within the iteration budget.
Trajectory rrt_star(const OccupancyGrid& grid, const Point& start, const Point& goal, const RrtConfig& cfg,
                    std::mt19937_64& rng);

/// Plans to occupancy frontier centroids in random order until one succeeds.
Trajectory rrt_star_frontier_baseline(const Point& start, std::span<const Frontier> occ_frontiers,
                                      const OccupancyGrid& grid, std::mt19937_64& rng, const RrtConfig& cfg = {});

}  // namespace gdm
