#pragma once

#include "gdm/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gdm {

/// Fixed 2-D lattice. Cells are half-open: cell (i, j) covers
/// [origin + i*res, origin + (i+1)*res) on each axis.
struct Lattice {
  Point origin = Point::Zero();
  double resolution = 0.1;
  int width = 1;
  int height = 1;

  Lattice() = default;
  Lattice(Point origin, double resolution, int width, int height);

  int size() const { return width * height; }
  double cell_area() const { return resolution * resolution; }
  bool contains(Cell c) const { return c.ix >= 0 && c.iy >= 0 && c.ix < width && c.iy < height; }
  bool contains(const Point& x) const;
  int index(Cell c) const { return c.iy * width + c.ix; }
  Cell cell(int index) const { return {index % width, index / width}; }
  Point center(Cell c) const;
  Point center(int index) const { return center(cell(index)); }
  Point extent() const { return {width * resolution, height * resolution}; }
};

/// Containing cell of a world point; throws BoundsError outside the lattice.
Cell cell_of(const Lattice& lattice, const Point& x);
std::optional<Cell> try_cell_of(const Lattice& lattice, const Point& x);
/// Linear index of the containing cell, or -1 outside the lattice.
int index_of(const Lattice& lattice, const Point& x);

inline constexpr std::array<std::pair<int, int>, 8> kNeighbors8{
    {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
inline constexpr std::array<std::pair<int, int>, 4> kNeighbors4{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};

template <class F>
void for_each_neighbor8(const Lattice& lattice, int index, F&& f) {
  const Cell c = lattice.cell(index);
  for (auto [dx, dy] : kNeighbors8) {
    const Cell n{c.ix + dx, c.iy + dy};
    if (lattice.contains(n)) f(lattice.index(n));
  }
}

template <class F>
void for_each_neighbor4(const Lattice& lattice, int index, F&& f) {
  const Cell c = lattice.cell(index);
  for (auto [dx, dy] : kNeighbors4) {
    const Cell n{c.ix + dx, c.iy + dy};
    if (lattice.contains(n)) f(lattice.index(n));
  }
}

/// Inverse sensor model constants (log-odds increments and probability clamps).
struct SensorModel {
  double l_free = -0.4;
  double l_occ = 0.85;
  double p_min = 0.02;
  double p_max = 0.98;
};

/// Occupancy belief per cell. 0.5 is the unknown prior.
class OccupancyGrid {
 public:
  explicit OccupancyGrid(Lattice lattice, double tau_free = 0.25, double tau_occ = 0.65);

  const Lattice& lattice() const { return lattice_; }
  double tau_free() const { return tau_free_; }
  double tau_occ() const { return tau_occ_; }

  double prob(int index) const { return prob_[index]; }
  void set_prob(int index, double p);
  const Eigen::ArrayXd& probs() const { return prob_; }

  bool is_free(int index) const { return prob_[index] <= tau_free_; }
  bool is_occupied(int index) const { return prob_[index] >= tau_occ_; }
  bool is_unknown(int index) const { return !is_free(index) && !is_occupied(index); }
  bool is_free(const Point& x) const {
    const int i = index_of(lattice_, x);
    return i >= 0 && is_free(i);
  }

 private:
  Lattice lattice_;
  Eigen::ArrayXd prob_;
  double tau_free_;
  double tau_occ_;
};

/// Cells with prob <= tau_free, plus their area.
struct KnownFreeSet {
  std::vector<int> cells;     // ascending linear indices
  std::vector<char> member;   // lattice-sized membership mask
  double lebesgue_measure = 0.0;

  std::size_t size() const { return cells.size(); }
  bool empty() const { return cells.empty(); }
  bool contains(int index) const { return index >= 0 && index < static_cast<int>(member.size()) && member[index]; }
};

KnownFreeSet known_free(const OccupancyGrid& grid);

struct RangeReading {
  double bearing = 0.0;  // rad, relative to the pose heading
  double range = 0.0;    // m
};

/// Log-odds ray update. Every cell is touched at most once per scan; hits take
/// precedence over pass-throughs. Readings at or beyond max_range carry no hit.
/// A hit on a cell boundary belongs to the cell the ray enters there.
void integrate_scan(OccupancyGrid& grid, const Pose& pose, std::span<const RangeReading> ranges,
                    double max_range, const SensorModel& model = {});

/// Marks every cell whose centre lies within `radius` of an occupied cell centre.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

/// Number of discrete points used on a segment of length `length`.
inline int segment_point_count(double length, double step) {
  if (length <= 0.0) return 1;
  return static_cast<int>(std::ceil(length / step - 1e-9)) + 1;
}

/// Visits the discrete points of the straight segment a->b at spacing <= step,
/// both endpoints included. Points are generated from the nearer endpoint, so
/// tracing b->a visits exactly the reversed sequence. f(point, cell_index) with
/// cell_index == -1 outside the lattice; returning false stops the walk.
template <class F>
void trace_segment(const Lattice& lattice, const Point& a, const Point& b, double step, F&& f) {
  const double length = (b - a).norm();
  const int n = segment_point_count(length, step) - 1;
  if (n == 0) {
    f(a, index_of(lattice, a));
    return;
  }
  for (int i = 0; i <= n; ++i) {
    Point p;
    if (2 * i < n) {
      p = a + (static_cast<double>(i) / n) * (b - a);
    } else if (2 * i > n) {
      p = b + (static_cast<double>(n - i) / n) * (a - b);
    } else {
      p = 0.5 * (a + b);
    }
    if (!f(static_cast<const Point&>(p), index_of(lattice, p))) return;
  }
}

struct SegmentTrace {
  std::vector<Point> points;
  std::vector<int> cells;  // consecutive duplicates removed, traversal order
};

SegmentTrace segment_cells(const Lattice& lattice, const Point& a, const Point& b, double step);

/// Default supersampling step for collision tests and edge costs.
inline double segment_step(const Lattice& lattice) { return 0.5 * lattice.resolution; }

bool is_segment_known_free(const OccupancyGrid& grid, const Point& a, const Point& b);

/// Centre of the known-free cell nearest to x (ties: lowest index).
std::optional<Point> snap_to_free(const OccupancyGrid& grid, const Point& x);

}  // namespace gdm
