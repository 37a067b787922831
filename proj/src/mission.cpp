#include "gdm/mission.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <deque>

namespace gdm {

namespace {

// RNG stream ids. Sensor streams are drawn once per mission, the others per step.
constexpr std::uint64_t kStreamGoals = 1;
constexpr std::uint64_t kStreamSamples = 2;
constexpr std::uint64_t kStreamFallback = 3;
constexpr std::uint64_t kStreamLidar = 101;
constexpr std::uint64_t kStreamGas = 102;

constexpr double kTimeEps = 1e-9;

}  // namespace

std::optional<MissionConfig> make_mission_config(std::string_view name, const PlannerConfig& planner) {
  MissionConfig cfg;
  cfg.planner = planner;
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  if (key == "baseline") {
    cfg.method = Method::Baseline;
    cfg.id = "RRT*-F/EUC";
    return cfg;
  }
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
  const auto policy = parse_goal_policy(key);
  if (!policy) return std::nullopt;
  cfg.policy = *policy;
  cfg.id = "XIT-" + std::string(to_string(*policy)) + (planner.cost == CostKind::Ucb ? "/UCB" : "/EUC");
  return cfg;
}

Mission::Mission(Scenario scenario, MissionConfig config, std::uint64_t seed)
    : scenario_(std::move(scenario)),
      config_(std::move(config)),
      seed_(seed),
      truth_(scenario_),
      truth_free_(truth_free_mask(scenario_)),
      crit_(critical_set(truth_, scenario_.lattice(), truth_free_, scenario_.z_thresh)),
      state_{0,
             0.0,
             scenario_.start,
             OccupancyGrid(scenario_.lattice(), scenario_.tau_free, scenario_.tau_occ),
             OccupancyGrid(scenario_.lattice(), scenario_.tau_free, scenario_.tau_occ),
             GasMap(scenario_.lattice(), scenario_.gmrf),
             GasPosterior{},
             GasFrontierStore{},
             0},
      lidar_rng_(make_rng(seed, 0, kStreamLidar)),
      gas_rng_(make_rng(seed, 0, kStreamGas)) {
  config_.planner.validate();
  for (int i = 0; i < scenario_.initial_scans; ++i) scan();
  sample_gas_here();
  full_solve();
}

bool Mission::finished() const {
  return early_terminated_ || state_.t >= scenario_.budget || state_.step >= config_.max_steps;
}

void Mission::scan() {
  const auto ranges = simulate_lidar(state_.pose, scenario_.obstacles, scenario_.lidar, lidar_rng_);
  integrate_scan(state_.occ, state_.pose, ranges, scenario_.lidar.max_range);
  state_.inflated = inflate(state_.occ, scenario_.inflation);
}

void Mission::refresh_structure() { state_.gas.rebuild_structure(state_.occ); }

void Mission::sample_gas_here() {
  refresh_structure();
  const Point& p = state_.pose.position;
  const int cell = index_of(scenario_.lattice(), p);
  const auto& cells = state_.gas.cells();
  if (cell < 0 || !std::binary_search(cells.begin(), cells.end(), cell)) return;
  const double z = sample_gas(truth_, p, state_.t, scenario_.gas_noise, gas_rng_);
  state_.gas.add_observation({p, z, state_.t});
}

void Mission::full_solve() {
  refresh_structure();
  state_.gas.set_time(state_.t);
  state_.post = state_.gas.solve_iterative();
}

void Mission::execute(const Trajectory& traj) {
  const auto& w = traj.waypoints;
  if (w.size() < 2 || !(traj.length() > 0.0)) return;

  const double v = scenario_.speed;
  const double t0 = state_.t;
  std::vector<double> arrive(w.size(), t0);
  for (std::size_t i = 1; i < w.size(); ++i) arrive[i] = arrive[i - 1] + (w[i] - w[i - 1]).norm() / v;
  const double t_stop = std::min(arrive.back(), scenario_.budget);
  const double gas_dt = 1.0 / scenario_.gas_rate_hz;
  const double scan_dt = 1.0 / scenario_.lidar.rate_hz;

  const std::size_t last = w.size() - 1;
  std::size_t seg = 0;
  long k_gas = 1, k_scan = 1;

  auto place = [&](double t) {
    const Point d = w[seg + 1] - w[seg];
    const double span = arrive[seg + 1] - arrive[seg];
    const double f = span > 0.0 ? std::clamp((t - arrive[seg]) / span, 0.0, 1.0) : 1.0;
    state_.pose.position = w[seg] + f * d;
    if (d.squaredNorm() > 0.0) state_.pose.heading = std::atan2(d.y(), d.x());
    state_.t = t;
  };
  auto remaining_free = [&]() {
    const Point& p = state_.pose.position;
    if (!state_.inflated.is_free(p)) return false;
    if (seg >= last) return true;
    if (!is_segment_known_free(state_.inflated, p, w[seg + 1])) return false;
    for (std::size_t j = seg + 1; j < last; ++j)
      if (!is_segment_known_free(state_.inflated, w[j], w[j + 1])) return false;
    return true;
  };

  bool blocked = false;
  while (true) {
    const double t_wp = arrive[seg + 1];
    const double t_gas = t0 + static_cast<double>(k_gas) * gas_dt;
    const double t_scan = t0 + static_cast<double>(k_scan) * scan_dt;
    const double t_next = std::min({t_wp, t_gas, t_scan});
    if (t_next > t_stop + kTimeEps) {
      place(t_stop);
      break;
    }
    place(t_next);
    // Simultaneous events resolve as waypoint, then scan, then gas sample.
    if (t_wp <= t_next + kTimeEps) {
      state_.pose.position = w[seg + 1];
      ++seg;
      refresh_structure();
      state_.gas.set_time(state_.t);
      state_.gas.solve_mean();
    }
    if (t_scan <= t_next + kTimeEps) {
      ++k_scan;
      scan();
      blocked = !remaining_free();
    }
    if (t_gas <= t_next + kTimeEps) {
      ++k_gas;
      sample_gas_here();
    }
    if (blocked || seg >= last) break;
  }
  state_.t = std::min(state_.t, scenario_.budget);

  if (blocked && !state_.inflated.is_free(state_.pose.position)) {
    // The new scan inflated the cell under the robot: back off to the nearest safe cell.
    if (const auto safe = snap_to_free(state_.inflated, state_.pose.position)) {
      const double d = (*safe - state_.pose.position).norm();
      state_.pose.position = *safe;
      state_.t = std::min(state_.t + d / v, scenario_.budget);
    }
  }
}

std::optional<Trajectory> Mission::plan_xit(std::span<const Frontier> goals, std::mt19937_64& rng) {
  const PlannerConfig& pc = config_.planner;
  const KnownFreeSet free = known_free(state_.inflated);
  if (free.empty()) return std::nullopt;
  if (pc.cost == CostKind::Ucb)
    last_field_ = build_field(state_.post, free, pc.beta);
  else
    last_field_ = flat_field(scenario_.lattice(), free);
  const CostModel cost = pc.cost == CostKind::Ucb ? CostModel(state_.inflated, *last_field_, pc.alpha)
                                                  : CostModel::euclidean(state_.inflated, 1.0);

  const Point robot = state_.pose.position;
  const int robot_cell = index_of(scenario_.lattice(), robot);
  const int exclude[] = {robot_cell};
  SampleBatch batch;
  try {
    batch = informed_sample(*last_field_, pc.n_samples, pc.epsilon_mix, exclude, rng);
  } catch (const EmptyBatchError&) {
    return std::nullopt;
  }
  const int n = std::max(2, static_cast<int>(batch.states.size()));
  const double radius = connection_radius(n, free.lebesgue_measure, 2, pc.gamma_scale, pc.epsilon_mix);
  last_plan_ = plan(batch, robot, make_goal_regions(batch, goals, pc.k_n), cost, radius, pc.heuristic);
  if (last_plan_->trajectories.empty()) return std::nullopt;
  return select_nbt(last_plan_->trajectories);
}

std::optional<Trajectory> Mission::plan_fallback(std::mt19937_64& rng) {
  // Uniform goal over the inflated-free cells reachable from the robot.
  const Lattice& lat = scenario_.lattice();
  const int start = index_of(lat, state_.pose.position);
  if (start < 0 || !state_.inflated.is_free(start)) return std::nullopt;
  std::vector<char> seen(lat.size(), 0);
  std::vector<int> reach;
  std::deque<int> q{start};
  seen[start] = 1;
  while (!q.empty()) {
    const int c = q.front();
    q.pop_front();
    if (c != start) reach.push_back(c);
    for_each_neighbor8(lat, c, [&](int n) {
      if (!seen[n] && state_.inflated.is_free(n)) {
        seen[n] = 1;
        q.push_back(n);
      }
    });
  }
  if (reach.empty()) return std::nullopt;
  std::sort(reach.begin(), reach.end());
  std::uniform_int_distribution<std::size_t> pick(0, reach.size() - 1);
  Frontier goal;
  goal.cells = {reach[pick(rng)]};
  goal.centroid = lat.center(goal.cells.front());

  if (config_.method == Method::Baseline) {
    try {
      return rrt_star(state_.inflated, state_.pose.position, goal.centroid, config_.rrt, rng);
    } catch (const NoTrajectoryError&) {
      return std::nullopt;
    }
  }
  const Frontier goals[] = {goal};
  return plan_xit(goals, rng);
}

StepRecord Mission::step() {
  if (finished()) throw PreconditionError("mission already finished");
  const int k = ++state_.step;
  auto rng_goals = make_rng(seed_, static_cast<std::uint64_t>(k), kStreamGoals);
  auto rng_samples = make_rng(seed_, static_cast<std::uint64_t>(k), kStreamSamples);
  auto rng_fallback = make_rng(seed_, static_cast<std::uint64_t>(k), kStreamFallback);
  const Point robot = state_.pose.position;
  const auto t_begin = std::chrono::steady_clock::now();

  last_field_.reset();
  last_plan_.reset();
  last_occ_frontiers_ = detect_occ_frontiers(state_.inflated, scenario_.min_frontier_size, robot);

  std::optional<Trajectory> traj;
  if (config_.method == Method::Baseline) {
    if (!last_occ_frontiers_.empty()) {
      try {
        traj = rrt_star_frontier_baseline(robot, last_occ_frontiers_, state_.inflated, rng_goals, config_.rrt);
      } catch (const NoTrajectoryError&) {
      }
    }
  } else {
    const GasKnowledgePartition part = partition_knowledge(state_.post, scenario_.kappa);
    const GasThreshold thr =
        dynamic_threshold(state_.post, part, scenario_.percentile, scenario_.tau_gas_min);
    const std::vector<char> crit = critical_mask(state_.post, part, thr);
    state_.store.revalidate(part, crit, state_.inflated, scenario_.min_frontier_size);
    std::vector<Frontier> detected;
    if (state_.post.contains(index_of(scenario_.lattice(), robot)))
      detected = detect_gas_frontiers(state_.post, state_.inflated, part, robot, thr, scenario_.min_frontier_size);
    state_.store.merge(detected, state_.inflated, k);

    const auto goals = select_goals(config_.policy, last_occ_frontiers_, state_.store.live(),
                                    config_.planner.max_goals, rng_goals);
    if (!goals.empty()) traj = plan_xit(goals, rng_samples);
  }

  bool fallback = false;
  if (!traj) {
    fallback = true;
    traj = plan_fallback(rng_fallback);
  }
  const double plan_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_begin).count();

  if (!traj) {
    if (++state_.consecutive_failures >= 2) early_terminated_ = true;
    return record("none", fallback, plan_ms, 0.0);
  }
  state_.consecutive_failures = 0;
  execute(*traj);
  // Sense at the arrival pose so the next step starts from a sensed cell.
  if (state_.t < scenario_.budget) {
    scan();
    sample_gas_here();
  }
  full_solve();
  return record(fallback ? "fallback" : std::string(to_string(traj->kind)), fallback, plan_ms, traj->length());
}

StepRecord Mission::record(const std::string& goal_kind, bool fallback, double plan_ms, double length) const {
  StepRecord r;
  r.step = state_.step;
  r.t = state_.t;
  if (!crit_.empty()) r.rmse = rmse(state_.post, crit_);
  r.entropy = entropy(state_.post, crit_);
  r.completeness = completeness(state_.occ, truth_free_);
  r.plan_time_ms = config_.timing ? plan_ms : 0.0;
  r.goal_kind = goal_kind;
  r.fallback = fallback;
  r.path_length = length;
  r.observations = state_.gas.observations().size();
  r.position = state_.pose.position;
  r.pose_safe = state_.inflated.is_free(r.position);
  return r;
}

MissionResult Mission::run() {
  std::vector<StepRecord> log;
  while (!finished()) log.push_back(step());
  return {std::move(log), early_terminated_, state_};
}

MissionResult run_mission(const Scenario& scenario, const MissionConfig& config, std::uint64_t seed) {
  return Mission(scenario, config, seed).run();
}

}  // namespace gdm
