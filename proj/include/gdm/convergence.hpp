#pragma once

#include "gdm/info_field.hpp"
#include "gdm/planner.hpp"
#include "gdm/scenario.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gdm {

/// Frozen single-plan problem: fully known inflated map, information field
/// from the normalised ground truth, fixed start and goal.
struct ConvergenceCase {
  std::string name;
  OccupancyGrid grid;
  KnownFreeSet free;
  InfoField field;
  Point start = Point::Zero();
  Point goal = Point::Zero();  // centre of the goal cell
};

/// Requires a scenario with a convergence goal.
ConvergenceCase make_convergence_case(const Scenario& s);

/// Connection radius the planner uses for a batch of n samples.
double convergence_radius(const ConvergenceCase& c, const PlannerConfig& cfg, int n);

/// Cost of the best trajectory for one batch of n informed samples plus the
/// goal state (kInf if the goal was not reached).
double plan_once(const ConvergenceCase& c, const PlannerConfig& cfg, double alpha, int n, std::uint64_t seed);

/// Radius-graph Dijkstra over every free cell centre, with the radius the
/// planner would use at n_ref samples.
double oracle_cost(const ConvergenceCase& c, const PlannerConfig& cfg, double alpha, int n_ref = 800);

struct ConvergenceRow {
  int n = 0;
  std::uint64_t seed = 0;
  double cost = 0.0;
};

/// plan_once for every (n, seed) pair, n-major.
std::vector<ConvergenceRow> convergence_study(const ConvergenceCase& c, const PlannerConfig& cfg, double alpha,
                                              std::span<const int> ns, std::span<const std::uint64_t> seeds);

/// Median of the finite and infinite costs alike (kInf sorts last).
double median(std::vector<double> v);

}  // namespace gdm
