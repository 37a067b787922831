#pragma once

#include "gdm/gas.hpp"
#include "gdm/grid.hpp"

#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace gdm {

enum class FrontierKind { Occupancy, Gas };

std::string_view to_string(FrontierKind kind);

struct Frontier {
  FrontierKind kind = FrontierKind::Occupancy;
  std::vector<int> cells;  // lattice indices, ascending
  Point centroid = Point::Zero();
  int id = -1;
  int created_step = 0;

  int size() const { return static_cast<int>(cells.size()); }
};

/// Mean of the cell centres, snapped to the nearest known-free cell of `occ`.
/// Falls back to the raw mean when `occ` has no free cell.
Point frontier_centroid(const OccupancyGrid& occ, std::span<const int> cells);

/// Known-free cells with an unknown 8-neighbour, clustered by 8-connectivity.
/// When `robot` is given, only clusters touching the robot's free component
/// are returned (wavefront semantics).
std::vector<Frontier> detect_occ_frontiers(const OccupancyGrid& occ, int min_frontier_size = 3,
                                           std::optional<Point> robot = std::nullopt);

struct GasThreshold {
  double tau_gas = 2.0;
  double q_p = 0.0;
  double percentile = 10.0;
  double tau_gas_min = 2.0;
};

/// Nearest-rank percentile of the posterior mean over observed cells.
GasThreshold dynamic_threshold(const GasPosterior& post, const GasKnowledgePartition& part, double percentile = 10.0,
                               double tau_gas_min = 2.0);

/// Lattice-sized mask of observed cells whose mean reaches tau_gas.
std::vector<char> critical_mask(const GasPosterior& post, const GasKnowledgePartition& part,
                                const GasThreshold& thr);

bool is_new_gas_frontier_cell(const Lattice& lattice, int cell, const GasKnowledgePartition& part,
                              const std::vector<char>& critical, const std::vector<char>& flagged);

/// Wavefront gas frontier detection from the robot's cell.
std::vector<Frontier> detect_gas_frontiers(const GasPosterior& post, const OccupancyGrid& occ,
                                           const GasKnowledgePartition& part, const Point& robot,
                                           const GasThreshold& thr, int min_frontier_size = 3);

/// Gas frontiers remembered across planning steps.
class GasFrontierStore {
 public:
  const std::vector<Frontier>& live() const { return live_; }
  const std::vector<Frontier>& resolved() const { return resolved_; }

  /// Drops cells that no longer satisfy the gas frontier predicate, splits the
  /// remainder into 8-connected pieces, and retires pieces below the size floor.
  void revalidate(const GasKnowledgePartition& part, const std::vector<char>& critical, const OccupancyGrid& occ,
                  int min_frontier_size = 3);
  /// New detections sharing a cell with live frontiers are merged into them.
  void merge(std::span<const Frontier> detected, const OccupancyGrid& occ, int step);

 private:
  std::vector<Frontier> live_;
  std::vector<Frontier> resolved_;
  int next_id_ = 0;
};

enum class GoalPolicy { F, FGF, GFF };

std::string_view to_string(GoalPolicy policy);
std::optional<GoalPolicy> parse_goal_policy(std::string_view name);

/// Ordered goal frontiers per policy; never more than max_goals, no duplicates.
std::vector<Frontier> select_goals(GoalPolicy policy, std::span<const Frontier> occ_frontiers,
                                   std::span<const Frontier> gas_frontiers, int max_goals, std::mt19937_64& rng);

/// Uniform random subset of size min(k, n) of {0..n-1}, in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::mt19937_64& rng);

}  // namespace gdm
