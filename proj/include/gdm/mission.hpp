#pragma once

#include "gdm/eval.hpp"
#include "gdm/frontier.hpp"
#include "gdm/gas.hpp"
#include "gdm/grid.hpp"
#include "gdm/info_field.hpp"
#include "gdm/planner.hpp"
#include "gdm/rrt_star.hpp"
#include "gdm/scenario.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gdm {

enum class Method { Xit, Baseline };

struct MissionConfig {
  std::string id = "XIT-GFF/UCB";
  Method method = Method::Xit;
  GoalPolicy policy = GoalPolicy::GFF;
  PlannerConfig planner;
  RrtConfig rrt;
  bool timing = false;  // record wall-clock planning time (not reproducible)
  int max_steps = 10000;
};

/// Named configurations: "gff", "fgf", "f" (XIT with the given policy) and
/// "baseline" (RRT* to occupancy frontiers). `planner` supplies N, k_n etc.
std::optional<MissionConfig> make_mission_config(std::string_view name, const PlannerConfig& planner);

struct StepRecord {
  int step = 0;
  double t = 0.0;
  std::optional<double> rmse;  // empty when the critical set is empty
  double entropy = 0.0;
  double completeness = 0.0;
  double plan_time_ms = 0.0;
  std::string goal_kind;  // occupancy | gas | fallback | none
  bool fallback = false;
  double path_length = 0.0;
  std::size_t observations = 0;
  Point position = Point::Zero();
  bool pose_safe = true;
};

struct MissionState {
  int step = 0;
  double t = 0.0;
  Pose pose;
  OccupancyGrid occ;
  OccupancyGrid inflated;
  GasMap gas;
  GasPosterior post;
  GasFrontierStore store;
  int consecutive_failures = 0;
};

struct MissionResult {
  std::vector<StepRecord> log;
  bool early_terminated = false;
  MissionState final_state;
};

/// Closed-loop sense, plan and execute cycle on one scenario.
class Mission {
 public:
  Mission(Scenario scenario, MissionConfig config, std::uint64_t seed);

  const Scenario& scenario() const { return scenario_; }
  const MissionConfig& config() const { return config_; }
  const MissionState& state() const { return state_; }
  const CriticalSet& critical() const { return crit_; }
  const std::vector<char>& truth_free() const { return truth_free_; }
  bool finished() const;
  bool early_terminated() const { return early_terminated_; }

  /// One planning step followed by execution. Requires !finished().
  StepRecord step();
  /// Follows `traj` from the current pose. Scans and gas samples are taken on
  /// their own clocks; stops early at the budget or when the remaining path
  /// becomes blocked.
  void execute(const Trajectory& traj);
  MissionResult run();

  // Planner internals from the most recent XIT step, for snapshot export.
  const std::optional<InfoField>& last_field() const { return last_field_; }
  const std::optional<PlanResult>& last_plan() const { return last_plan_; }
  const std::vector<Frontier>& last_occ_frontiers() const { return last_occ_frontiers_; }

 private:
  void scan();
  void sample_gas_here();
  void refresh_structure();
  void full_solve();
  std::optional<Trajectory> plan_xit(std::span<const Frontier> goals, std::mt19937_64& rng);
  std::optional<Trajectory> plan_fallback(std::mt19937_64& rng);
  StepRecord record(const std::string& goal_kind, bool fallback, double plan_ms, double length) const;

  Scenario scenario_;
  MissionConfig config_;
  std::uint64_t seed_;
  GroundTruthField truth_;
  std::vector<char> truth_free_;
  CriticalSet crit_;
  MissionState state_;
  std::mt19937_64 lidar_rng_;
  std::mt19937_64 gas_rng_;
  bool early_terminated_ = false;

  std::optional<InfoField> last_field_;
  std::optional<PlanResult> last_plan_;
  std::vector<Frontier> last_occ_frontiers_;
};

MissionResult run_mission(const Scenario& scenario, const MissionConfig& config, std::uint64_t seed);

}  // namespace gdm
