#include "gdm/scenario.hpp"

#include <cmath>

namespace gdm {

GroundTruthField::GroundTruthField(const Scenario& s)
    : obstacles_(s.obstacles),
      sources_(s.sources),
      wind_dir_(std::cos(s.wind_direction), std::sin(s.wind_direction)),
      wind_speed_(s.wind_speed),
      plume_(s.plume),
      z_thresh_(s.z_thresh) {}

double GroundTruthField::operator()(const Point& x, double) const {
  for (const auto& r : obstacles_)
    if (r.contains(x)) return 0.0;
  const Point cross_dir(-wind_dir_.y(), wind_dir_.x());
  double total = 0.0;
  for (const auto& src : sources_) {
    bool shadowed = false;
    for (const auto& r : obstacles_) {
      if (r.intersects_segment(src.position, x)) {
        shadowed = true;
        break;
      }
    }
    if (shadowed) continue;
    const Point rel = x - src.position;
    const double d = rel.dot(wind_dir_);
    const double c = rel.dot(cross_dir);
    const double sa = d >= 0.0 ? plume_.sigma0 + plume_.k_along * wind_speed_ : plume_.sigma0;
    const double sc = plume_.sigma0 + plume_.k_cross * std::max(d, 0.0);
    const double amp = src.rate * plume_.residence / (1.0 + wind_speed_);
    total += amp * std::exp(-0.5 * ((d / sa) * (d / sa) + (c / sc) * (c / sc)));
  }
  return total;
}

std::vector<char> truth_free_mask(const Scenario& s) {
  const Lattice lat = s.lattice();
  std::vector<char> mask(lat.size(), 0);
  for (int i = 0; i < lat.size(); ++i) mask[i] = !s.in_obstacle(lat.center(i));
  return mask;
}

}  // namespace gdm
