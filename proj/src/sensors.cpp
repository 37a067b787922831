#include "gdm/scenario.hpp"

#include <cmath>
#include <numbers>

namespace gdm {

std::vector<RangeReading> simulate_lidar(const Pose& pose, const std::vector<Rect>& obstacles, const LidarConfig& cfg,
                                         std::mt19937_64& rng) {
  std::vector<RangeReading> out(static_cast<std::size_t>(cfg.rays));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < cfg.rays; ++i) {
    const double bearing = 2.0 * std::numbers::pi * i / cfg.rays;
    const double th = pose.heading + bearing;
    const Point dir(std::cos(th), std::sin(th));
    double range = cfg.max_range;
    for (const auto& r : obstacles)
      if (auto t = r.ray_hit(pose.position, dir)) range = std::min(range, *t);
    if (range < cfg.max_range && cfg.noise > 0.0)
      range = std::clamp(range + cfg.noise * noise(rng), 0.0, cfg.max_range);
    out[i] = {bearing, range};
  }
  return out;
}

double sample_gas(const GroundTruthField& field, const Point& position, double t, double noise_sigma,
                  std::mt19937_64& rng) {
  const double truth = field(position, t);
  if (noise_sigma <= 0.0) return truth;
  std::normal_distribution<double> noise(0.0, noise_sigma);
  return std::max(0.0, truth + noise(rng));
}

}  // namespace gdm
