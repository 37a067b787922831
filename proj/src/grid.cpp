#include "gdm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gdm {

namespace {

// Absorbs representation error so that points on a cell boundary land in the
// upper cell, as the half-open convention requires (0.3 / 0.1 = 2.9999...).
constexpr double kBoundarySlack = 1e-9;

int axis_index(double x, double origin, double resolution) {
  return static_cast<int>(std::floor((x - origin) / resolution + kBoundarySlack));
}

// Cell index along one axis of the cell a ray enters at coordinate x. On a
// boundary the direction decides; elsewhere this is the containing cell.
int entered_index(double x, double dir, double origin, double resolution) {
  const double v = (x - origin) / resolution;
  const double k = std::round(v);
  if (std::abs(v - k) > kBoundarySlack) return static_cast<int>(std::floor(v));
  return static_cast<int>(k) - (dir < 0.0 ? 1 : 0);
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double l) { return 1.0 / (1.0 + std::exp(-l)); }

}  // namespace

Lattice::Lattice(Point origin_, double resolution_, int width_, int height_)
    : origin(std::move(origin_)), resolution(resolution_), width(width_), height(height_) {
  if (!(resolution > 0.0)) throw PreconditionError("lattice resolution must be positive");
  if (width < 1 || height < 1) throw PreconditionError("lattice must have at least one cell");
}

bool Lattice::contains(const Point& x) const { return try_cell_of(*this, x).has_value(); }

Point Lattice::center(Cell c) const {
  return origin + Point((c.ix + 0.5) * resolution, (c.iy + 0.5) * resolution);
}

std::optional<Cell> try_cell_of(const Lattice& lattice, const Point& x) {
  if (!x.allFinite()) return std::nullopt;
  const Cell c{axis_index(x.x(), lattice.origin.x(), lattice.resolution),
               axis_index(x.y(), lattice.origin.y(), lattice.resolution)};
  if (!lattice.contains(c)) return std::nullopt;
  return c;
}

Cell cell_of(const Lattice& lattice, const Point& x) {
  if (auto c = try_cell_of(lattice, x)) return *c;
  throw BoundsError("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                    ") lies outside the lattice");
}

int index_of(const Lattice& lattice, const Point& x) {
  if (auto c = try_cell_of(lattice, x)) return lattice.index(*c);
  return -1;
}

OccupancyGrid::OccupancyGrid(Lattice lattice, double tau_free, double tau_occ)
    : lattice_(std::move(lattice)),
      prob_(Eigen::ArrayXd::Constant(lattice_.size(), 0.5)),
      tau_free_(tau_free),
      tau_occ_(tau_occ) {
  if (!(tau_free > 0.0 && tau_free <= 0.5)) throw PreconditionError("tau_free must lie in (0, 0.5]");
  if (!(tau_occ >= 0.5 && tau_occ < 1.0 && tau_occ > tau_free))
    throw PreconditionError("tau_occ must lie in [0.5, 1) and exceed tau_free");
}

void OccupancyGrid::set_prob(int index, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("occupancy probability outside [0, 1]");
  prob_[index] = p;
}

KnownFreeSet known_free(const OccupancyGrid& grid) {
  const Lattice& lat = grid.lattice();
  KnownFreeSet out;
  out.member.assign(lat.size(), 0);
  for (int i = 0; i < lat.size(); ++i) {
    if (grid.is_free(i)) {
      out.cells.push_back(i);
      out.member[i] = 1;
    }
  }
  out.lebesgue_measure = static_cast<double>(out.cells.size()) * lat.cell_area();
  return out;
}

void integrate_scan(OccupancyGrid& grid, const Pose& pose, std::span<const RangeReading> ranges,
                    double max_range, const SensorModel& model) {
  const Lattice& lat = grid.lattice();
  if (index_of(lat, pose.position) < 0) throw BoundsError("scan pose outside the lattice");
  const double step = segment_step(lat);

  enum : char { kUntouched = 0, kMiss = 1, kHit = 2 };
  std::vector<char> mark(lat.size(), kUntouched);
  std::vector<int> touched;
  touched.reserve(4 * ranges.size());

  std::vector<int> ray_hit(ranges.size(), -1);
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    const auto& reading = ranges[r];
    if (!(reading.range < max_range)) continue;
    const double th = pose.heading + reading.bearing;
    const Point dir(std::cos(th), std::sin(th));
    const Point tip = pose.position + reading.range * dir;
    const Cell c{entered_index(tip.x(), dir.x(), lat.origin.x(), lat.resolution),
                 entered_index(tip.y(), dir.y(), lat.origin.y(), lat.resolution)};
    const int hit = lat.contains(c) ? lat.index(c) : -1;
    ray_hit[r] = hit;
    if (hit >= 0 && mark[hit] != kHit) {
      if (mark[hit] == kUntouched) touched.push_back(hit);
      mark[hit] = kHit;
    }
  }

  for (std::size_t r = 0; r < ranges.size(); ++r) {
    const auto& reading = ranges[r];
    const double th = pose.heading + reading.bearing;
    const Point dir(std::cos(th), std::sin(th));
    const double reach = std::clamp(reading.range, 0.0, max_range);
    const Point end = pose.position + reach * dir;
    const int hit = ray_hit[r];
    trace_segment(lat, pose.position, end, step, [&](const Point&, int cell) {
      if (cell < 0) return false;
      if (cell == hit) return true;
      if (mark[cell] == kUntouched) {
        mark[cell] = kMiss;
        touched.push_back(cell);
      }
      return true;
    });
  }

  for (int cell : touched) {
    const double p = std::clamp(grid.prob(cell), model.p_min, model.p_max);
    const double l = logit(p) + (mark[cell] == kHit ? model.l_occ : model.l_free);
    grid.set_prob(cell, std::clamp(sigmoid(l), model.p_min, model.p_max));
  }
}

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
  if (radius < 0.0) throw PreconditionError("inflation radius must be non-negative");
  OccupancyGrid out = grid;
  if (radius == 0.0) return out;
  const Lattice& lat = grid.lattice();
  const int reach = static_cast<int>(std::floor(radius / lat.resolution + 1e-9));
  const double r2 = radius * radius + 1e-9;
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx) {
      const double d2 = (dx * dx + dy * dy) * lat.resolution * lat.resolution;
      if (d2 <= r2) offsets.emplace_back(dx, dy);
    }
  for (int i = 0; i < lat.size(); ++i) {
    if (!grid.is_occupied(i)) continue;
    const Cell c = lat.cell(i);
    for (auto [dx, dy] : offsets) {
      const Cell n{c.ix + dx, c.iy + dy};
      if (!lat.contains(n)) continue;
      const int j = lat.index(n);
      if (!out.is_occupied(j)) out.set_prob(j, 1.0);
    }
  }
  return out;
}

SegmentTrace segment_cells(const Lattice& lattice, const Point& a, const Point& b, double step) {
  if (!(step > 0.0)) throw PreconditionError("segment step must be positive");
  SegmentTrace out;
  trace_segment(lattice, a, b, step, [&](const Point& p, int cell) {
    out.points.push_back(p);
    if (out.cells.empty() || out.cells.back() != cell) out.cells.push_back(cell);
    return true;
  });
  return out;
}

bool is_segment_known_free(const OccupancyGrid& grid, const Point& a, const Point& b) {
  bool ok = true;
  trace_segment(grid.lattice(), a, b, segment_step(grid.lattice()), [&](const Point&, int cell) {
    ok = cell >= 0 && grid.is_free(cell);
    return ok;
  });
  return ok;
}

std::optional<Point> snap_to_free(const OccupancyGrid& grid, const Point& x) {
  const Lattice& lat = grid.lattice();
  const double fx = (x.x() - lat.origin.x()) / lat.resolution - 0.5;
  const double fy = (x.y() - lat.origin.y()) / lat.resolution - 0.5;
  const int cx = std::clamp(static_cast<int>(std::lround(fx)), 0, lat.width - 1);
  const int cy = std::clamp(static_cast<int>(std::lround(fy)), 0, lat.height - 1);
  const int max_ring = std::max(lat.width, lat.height);

  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int ring = 0; ring <= max_ring; ++ring) {
    // Any cell on this ring is at least (ring - 1) cells away from x.
    const double bound = std::max(0, ring - 1) * lat.resolution;
    if (best >= 0 && bound * bound > best_d2) break;
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        const Cell c{cx + dx, cy + dy};
        if (!lat.contains(c)) continue;
        const int i = lat.index(c);
        if (!grid.is_free(i)) continue;
        const double d2 = (lat.center(c) - x).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
          best_d2 = d2;
          best = i;
        }
      }
    }
  }
  if (best < 0) return std::nullopt;
  return lat.center(best);
}

}  // namespace gdm
