#include "doctest.h"

#include "support.hpp"

#include "gdm/grid.hpp"
#include "gdm/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace gdm;
using gdm::test::grid_from_rows;
using gdm::test::open_grid;

TEST_SUITE("grid") {

TEST_CASE("cell_of uses half-open cells") {
  const Lattice lat(Point::Zero(), 0.1, 20, 20);
  CHECK(cell_of(lat, Point(0.05, 0.05)) == Cell{0, 0});
  CHECK(cell_of(lat, Point(1.00, 0.35)) == Cell{10, 3});
  CHECK_THROWS_AS(cell_of(lat, Point(-0.01, 0.0)), BoundsError);
  CHECK_THROWS_AS(cell_of(lat, Point(2.0, 0.5)), BoundsError);
}

TEST_CASE("world to cell round trip") {
  const Lattice lat(Point(-1.3, 2.2), 0.05, 37, 23);
  for (int i = 0; i < lat.size(); ++i) CHECK(index_of(lat, lat.center(i)) == i);
}

TEST_CASE("known_free") {
  OccupancyGrid g(Lattice(Point::Zero(), 0.1, 10, 10));
  CHECK(known_free(g).empty());
  g.set_prob(7, 0.1);
  auto one = known_free(g);
  REQUIRE(one.size() == 1);
  CHECK(one.cells[0] == 7);

  const auto all = known_free(open_grid(10, 10));
  CHECK(all.size() == 100);
  CHECK(all.lebesgue_measure == doctest::Approx(1.0));
}

TEST_CASE("known_free grows with tau_free") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Lattice lat(Point::Zero(), 0.1, 15, 15);
  OccupancyGrid lo(lat, 0.2), hi(lat, 0.4);
  for (int i = 0; i < lat.size(); ++i) {
    const double p = u(rng);
    lo.set_prob(i, p);
    hi.set_prob(i, p);
  }
  const auto a = known_free(lo), b = known_free(hi);
  for (int c : a.cells) CHECK(b.contains(c));
}

TEST_CASE("scan in an empty room frees every cell in range") {
  OccupancyGrid g(Lattice(Point::Zero(), 0.1, 40, 40));
  const Pose pose{Point(2.0, 2.0), 0.0};
  const LidarConfig cfg{720, 1.0, 0.0, 10.0};
  std::mt19937_64 rng(1);
  const auto ranges = simulate_lidar(pose, {}, cfg, rng);
  integrate_scan(g, pose, ranges, cfg.max_range);
  const Lattice& lat = g.lattice();
  const int centre = index_of(lat, pose.position);
  CHECK(g.prob(centre) == doctest::Approx(1.0 / (1.0 + std::exp(0.4))));
  CHECK_FALSE(g.is_free(centre));  // one miss is not enough evidence
  integrate_scan(g, pose, ranges, cfg.max_range);
  integrate_scan(g, pose, ranges, cfg.max_range);
  for (int i = 0; i < lat.size(); ++i) {
    const double d = (lat.center(i) - pose.position).norm();
    if (d < 0.9) CHECK(g.is_free(i));
    if (d > 1.2) CHECK(g.prob(i) == 0.5);
  }
}

TEST_CASE("single ray stops at a wall cell") {
  OccupancyGrid g(Lattice(Point::Zero(), 0.1, 20, 5));
  const Pose pose{Point(0.25, 0.25), 0.0};
  const RangeReading r[] = {{0.0, 1.0}};  // wall face at x = 1.25
  integrate_scan(g, pose, r, 4.0);
  const Lattice& lat = g.lattice();
  for (int ix = 2; ix < 12; ++ix) CHECK(g.prob(lat.index({ix, 2})) < 0.5);
  CHECK(g.prob(lat.index({12, 2})) > 0.5);
  CHECK(g.prob(lat.index({13, 2})) == 0.5);
}

TEST_CASE("a hit on a cell boundary belongs to the cell the ray enters") {
  const Lattice lat(Point::Zero(), 0.1, 20, 5);
  const RangeReading r[] = {{0.0, 1.0}};
  OccupancyGrid right(lat);
  integrate_scan(right, Pose{Point(0.2, 0.25), 0.0}, r, 4.0);  // ends at x = 1.2
  CHECK(right.prob(lat.index({12, 2})) > 0.5);
  CHECK(right.prob(lat.index({11, 2})) < 0.5);

  OccupancyGrid left(lat);
  integrate_scan(left, Pose{Point(1.7, 0.25), std::numbers::pi}, r, 4.0);  // ends at x = 0.7
  CHECK(left.prob(lat.index({6, 2})) > 0.5);
  CHECK(left.prob(lat.index({7, 2})) < 0.5);

  // Shallow hit on a horizontal face: the endpoint is on y = 0.2.
  OccupancyGrid shallow(lat);
  const double th = -std::atan2(0.05, 1.0);
  const RangeReading s[] = {{th, std::hypot(1.0, 0.05)}};
  integrate_scan(shallow, Pose{Point(0.25, 0.25), 0.0}, s, 4.0);
  CHECK(shallow.prob(lat.index({12, 1})) > 0.5);
  CHECK(shallow.prob(lat.index({12, 2})) <= 0.5);
}

TEST_CASE("repeated scans converge monotonically to the clamps") {
  OccupancyGrid g(Lattice(Point::Zero(), 0.1, 20, 5));
  const Pose pose{Point(0.25, 0.25), 0.0};
  const RangeReading r[] = {{0.0, 1.0}};
  const int free_cell = g.lattice().index({6, 2});
  const int hit_cell = g.lattice().index({12, 2});
  double pf = 0.5, ph = 0.5;
  for (int k = 0; k < 30; ++k) {
    integrate_scan(g, pose, r, 4.0);
    CHECK(g.prob(free_cell) <= pf);
    CHECK(g.prob(hit_cell) >= ph);
    pf = g.prob(free_cell);
    ph = g.prob(hit_cell);
    CHECK(pf >= 0.02);
    CHECK(ph <= 0.98);
  }
  CHECK(pf == doctest::Approx(0.02));
  CHECK(ph == doctest::Approx(0.98));
}

TEST_CASE("inflation disc") {
  OccupancyGrid g = open_grid(11, 11);
  const Lattice& lat = g.lattice();
  CHECK((inflate(g, 0.0).probs() == g.probs()).all());
  g.set_prob(lat.index({5, 5}), 1.0);
  const auto inf = inflate(g, 0.2);
  int occupied = 0;
  for (int i = 0; i < lat.size(); ++i) occupied += inf.is_occupied(i);
  CHECK(occupied == 13);

  // Union of two discs.
  g.set_prob(lat.index({6, 5}), 1.0);
  const auto two = inflate(g, 0.2);
  for (int i = 0; i < lat.size(); ++i) {
    const Cell c = lat.cell(i);
    const auto d2 = [&](int x, int y) { return (c.ix - x) * (c.ix - x) + (c.iy - y) * (c.iy - y); };
    CHECK(two.is_occupied(i) == (d2(5, 5) <= 4 || d2(6, 5) <= 4));
  }
  CHECK((inflate(two, 0.0).probs() == two.probs()).all());
}

TEST_CASE("inflation leaves unknown cells unknown") {
  auto g = grid_from_rows({"?????", "?.#.?", "?????"});
  const auto inf = inflate(g, 0.1);
  CHECK(inf.is_unknown(0));
  CHECK(inf.is_occupied(g.lattice().index({1, 1})));
}

TEST_CASE("segment points") {
  const Lattice lat(Point::Zero(), 0.1, 30, 30);
  CHECK(segment_cells(lat, Point(1, 1), Point(1, 1), 0.05).points.size() == 1);
  CHECK(segment_cells(lat, Point(0.5, 0.52), Point(1.5, 0.52), 0.05).points.size() == 21);
  CHECK_THROWS_AS(segment_cells(lat, Point(1, 1), Point(2, 1), 0.0), PreconditionError);
}

TEST_CASE("diagonal segment cells form an 8-connected chain") {
  const Lattice lat(Point::Zero(), 0.1, 40, 40);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 3.99);
  for (int k = 0; k < 200; ++k) {
    const Point a(u(rng), u(rng)), b(u(rng), u(rng));
    const auto tr = segment_cells(lat, a, b, segment_step(lat));
    CHECK(tr.cells.front() == index_of(lat, a));
    CHECK(tr.cells.back() == index_of(lat, b));
    for (std::size_t i = 1; i < tr.cells.size(); ++i) {
      const Cell p = lat.cell(tr.cells[i - 1]), q = lat.cell(tr.cells[i]);
      CHECK(std::max(std::abs(p.ix - q.ix), std::abs(p.iy - q.iy)) == 1);
    }
    // Reversal symmetry.
    auto back = segment_cells(lat, b, a, segment_step(lat)).cells;
    std::reverse(back.begin(), back.end());
    CHECK(back == tr.cells);
  }
}

TEST_CASE("segment collision rules") {
  auto g = grid_from_rows({
      "..........",
      "....#.....",
      "..........",
      "......?...",
      "..........",
  });
  CHECK(is_segment_known_free(g, Point(0.05, 0.05), Point(0.95, 0.05)));
  CHECK_FALSE(is_segment_known_free(g, Point(0.05, 0.35), Point(0.95, 0.35)));
  CHECK_FALSE(is_segment_known_free(g, Point(0.05, 0.15), Point(0.95, 0.15)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(0.0, 0.99), uy(0.0, 0.49);
  for (int k = 0; k < 300; ++k) {
    const Point a(ux(rng), uy(rng)), b(ux(rng), uy(rng));
    CHECK(is_segment_known_free(g, a, b) == is_segment_known_free(g, b, a));
  }
}

TEST_CASE("snap_to_free picks the nearest free centre") {
  auto g = grid_from_rows({"#####", "#...#", "#####"});
  const auto p = snap_to_free(g, Point(0.05, 0.15));
  REQUIRE(p);
  CHECK((*p - Point(0.15, 0.15)).norm() < 1e-12);
}

}  // TEST_SUITE
