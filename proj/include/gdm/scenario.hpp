#pragma once

#include "gdm/gas.hpp"
#include "gdm/grid.hpp"
#include "gdm/planner.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gdm {

/// Axis-aligned obstacle rectangle.
struct Rect {
  Point min = Point::Zero();
  Point max = Point::Zero();

  bool contains(const Point& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
  }
  /// Entry distance along the unit direction `dir`, if the ray passes through
  /// the interior. Touching a corner or running along a face is not a hit.
  std::optional<double> ray_hit(const Point& origin, const Point& dir) const;
  /// True if the closed segment a-b touches the rectangle.
  bool intersects_segment(const Point& a, const Point& b) const;
};

struct GasSource {
  Point position = Point::Zero();
  double rate = 0.0;  // ppm/s
};

struct PlumeModel {
  double sigma0 = 0.4;      // m
  double k_along = 0.3;     // m per (m/s) of wind
  double k_cross = 0.15;    // spread per metre downwind
  double residence = 0.2;   // s
};

struct LidarConfig {
  int rays = 720;
  double max_range = 4.0;
  double noise = 0.0;
  double rate_hz = 10.0;
};

struct Scenario {
  std::string name;
  Point origin = Point::Zero();
  Point size = Point(8.0, 10.0);
  double resolution = 0.1;
  std::vector<Rect> obstacles;
  std::vector<GasSource> sources;
  double wind_direction = 0.0;  // rad, direction the air moves toward
  double wind_speed = 1.0;      // m/s
  PlumeModel plume;
  Pose start;
  double speed = 1.25;
  double inflation = 0.2;
  double gas_rate_hz = 2.0;
  double gas_noise = 0.5;
  LidarConfig lidar;
  double tau_free = 0.25;
  double tau_occ = 0.65;
  int initial_scans = 5;
  GmrfHyper gmrf;
  double kappa = 0.9;
  int min_frontier_size = 3;
  double percentile = 10.0;
  double tau_gas_min = 2.0;
  double z_thresh = 2.5;
  double budget = 120.0;  // s
  std::uint64_t base_seed = 1;
  PlannerConfig planner;
  std::optional<Point> goal;  // fixed goal for single-plan convergence studies

  Lattice lattice() const;
  bool in_obstacle(const Point& p) const;
};

/// Problems found by semantic validation (empty when valid).
std::vector<std::string> validate_scenario(const Scenario& s);

/// Parses a scenario document. Throws PreconditionError with the offending key.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
/// Reads and validates a scenario file; parse errors carry line and column.
Scenario load_scenario(const std::string& path);

/// Analytic ground-truth plume.
class GroundTruthField {
 public:
  explicit GroundTruthField(const Scenario& s);

  double operator()(const Point& x, double t = 0.0) const;
  double z_thresh() const { return z_thresh_; }

 private:
  std::vector<Rect> obstacles_;
  std::vector<GasSource> sources_;
  Point wind_dir_;
  double wind_speed_;
  PlumeModel plume_;
  double z_thresh_;
};

/// Cells whose centre lies outside every obstacle.
std::vector<char> truth_free_mask(const Scenario& s);

/// Ranges for evenly spaced bearings over a full turn, relative to the heading.
std::vector<RangeReading> simulate_lidar(const Pose& pose, const std::vector<Rect>& obstacles, const LidarConfig& cfg,
                                         std::mt19937_64& rng);

double sample_gas(const GroundTruthField& field, const Point& position, double t, double noise_sigma,
                  std::mt19937_64& rng);

/// Generator for stream `stream` of `seed` at planning step `step`.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t stream);

}  // namespace gdm
