#pragma once

#include "gdm/planner.hpp"

#include <vector>

namespace gdm {

struct OracleResult {
  double cost = kInf;
  std::vector<Point> path;
};

/// Dijkstra over the start and every known-free cell centre of the cost
/// model's grid, joining pairs closer than `radius` with the same edge cost
/// the planner uses. The target is the known-free cell nearest to `goal`.
OracleResult grid_oracle(const CostModel& cost, const Point& start, const Point& goal, double radius);

}  // namespace gdm
