#pragma once

#include "gdm/frontier.hpp"
#include "gdm/grid.hpp"
#include "gdm/info_field.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Volume of the unit ball in `dim` dimensions.
double unit_ball_volume(int dim);
/// 2 (1 + 1/d)^{1/d} (lambda / xi_d)^{1/d}
double rgg_gamma(double lebesgue_free, int dim);
/// gamma (log n / n)^{1/d}
double connection_radius(int n_samples, double gamma, int dim);
/// Radius with gamma = gamma_scale * eps^{-1/d} * rgg_gamma(lambda, d).
double connection_radius(int n_samples, double lebesgue_free, int dim, double gamma_scale, double epsilon_mix);

/// Edge cost: summed information penalty over the segment's supersample points
/// plus alpha times length; infinite if any point is not known-free. The two
/// endpoints carry half weight, so a vertex shared by consecutive edges is
/// charged once along a path.
class CostModel {
 public:
  /// Information cost on `field`.
  CostModel(const OccupancyGrid& grid, const InfoField& field, double alpha);
  /// Distance-only cost (alpha * length), same collision rule.
  static CostModel euclidean(const OccupancyGrid& grid, double alpha = 1.0);

  double cost(const Point& a, const Point& b) const;
  /// Admissible estimate without collision checking.
  double estimate(const Point& a, const Point& b) const;
  /// Penalty sum along a->b ignoring collisions.
  double penalty_sum(const Point& a, const Point& b) const;

  double alpha() const { return alpha_; }
  bool uses_penalty() const { return field_ != nullptr; }
  double min_penalty() const { return min_penalty_; }
  double step() const { return step_; }
  const OccupancyGrid& grid() const { return *grid_; }

 private:
  CostModel(const OccupancyGrid& grid, const InfoField* field, double alpha);

  const OccupancyGrid* grid_;
  const InfoField* field_;
  double alpha_;
  double step_;
  double min_penalty_ = 0.0;
};

double edge_cost(const Point& a, const Point& b, const InfoField& field, double alpha, const OccupancyGrid& grid);

enum class HeuristicMode { DistanceOnly, UcbAware };
enum class CostKind { Ucb, Euclidean };

std::string_view to_string(HeuristicMode mode);
std::optional<HeuristicMode> parse_heuristic_mode(std::string_view name);
std::string_view to_string(CostKind kind);
std::optional<CostKind> parse_cost_kind(std::string_view name);

struct PlannerConfig {
  int n_samples = 300;
  int max_goals = 5;
  int k_n = 3;
  double epsilon_mix = 0.2;
  double alpha = 0.0;
  double beta = 1.0;
  double gamma_scale = 1.1;
  HeuristicMode heuristic = HeuristicMode::DistanceOnly;
  CostKind cost = CostKind::Ucb;

  void validate() const;
};

struct GoalRegion {
  Point nominal = Point::Zero();
  std::vector<int> members;  // vertex ids in the search tree (batch index + 1)
  int frontier_id = -1;
  FrontierKind kind = FrontierKind::Occupancy;
  bool solved = false;
};

/// Goal sets from the k_n batch samples nearest to each nominal point
/// (ties: lower cell index).
std::vector<GoalRegion> make_goal_regions(const SampleBatch& batch, std::span<const Frontier> frontiers, int k_n);

double heuristic(const Point& x, const GoalRegion& goal, std::span<const Point> vertices, HeuristicMode mode,
                 const CostModel& cost);

/// Vertex 0 is the root; vertex i + 1 is batch sample i.
struct SearchTree {
  std::vector<Point> points;
  std::vector<double> g;
  std::vector<int> parent;
  std::vector<double> edge_cost;  // cost of the edge from the parent
  std::vector<std::vector<int>> children;
  std::vector<char> in_tree;

  int size() const { return static_cast<int>(points.size()); }
  int vertex_count() const;
  std::vector<int> path_to(int v) const;
};

struct Trajectory {
  std::vector<Point> waypoints;
  std::vector<int> vertices;
  double cost = kInf;
  int goal = -1;
  int frontier_id = -1;
  FrontierKind kind = FrontierKind::Occupancy;

  double length() const;
};

struct PlanStats {
  int expansions = 0;
  int edges_queued = 0;
  int collision_checks = 0;
  int rewires = 0;
};

struct PlanResult {
  SearchTree tree;
  std::vector<GoalRegion> goals;
  std::vector<Trajectory> trajectories;
  double radius = 0.0;
  PlanStats stats;
};

/// Multi-goal informed tree over a fixed batch.
PlanResult plan(const SampleBatch& batch, const Point& root, std::vector<GoalRegion> goals, const CostModel& cost,
                double radius, HeuristicMode mode = HeuristicMode::DistanceOnly);

/// Empty when the tree is consistent; otherwise a description of the violation.
std::optional<std::string> check_tree(const SearchTree& tree, const CostModel& cost, double tol = 1e-9);

/// Lowest cost; ties by shorter length, then lower goal id. Throws
/// NoTrajectoryError on an empty list.
const Trajectory& select_nbt(std::span<const Trajectory> trajectories);

}  // namespace gdm
