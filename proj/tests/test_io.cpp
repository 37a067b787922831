#include "doctest.h"

#include "support.hpp"

#include "gdm/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gdm;

namespace {

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / ("gdm_test_" + std::string(name));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("step log round trip") {
  StepRecord a;
  a.step = 3;
  a.t = 12.5;
  a.rmse = 4.25;
  a.entropy = 101.0 / 3.0;
  a.completeness = 0.875;
  a.plan_time_ms = 17.0;
  a.goal_kind = "gas";
  a.path_length = 1.0 / 7.0;
  a.observations = 42;
  a.position = Point(1.1, 2.2);
  StepRecord b = a;
  b.step = 4;
  b.rmse.reset();
  b.goal_kind = "fallback";
  b.fallback = true;
  b.pose_safe = false;
  const auto trial = make_trial_result("XIT-GFF/UCB", 9, {a, b}, true);

  std::stringstream ss;
  write_step_log(ss, trial);
  const StepLog back = read_step_log(ss);
  CHECK(back.header["config"] == "XIT-GFF/UCB");
  CHECK(back.header["seed"] == 9);
  REQUIRE(back.steps.size() == 2);
  const StepRecord& r = back.steps[0];
  CHECK(r.t == a.t);
  CHECK(*r.rmse == *a.rmse);
  CHECK(r.entropy == a.entropy);
  CHECK(r.path_length == a.path_length);
  CHECK(r.position == a.position);
  CHECK(r.plan_time_ms == 0.0);  // not written without timing
  CHECK_FALSE(back.steps[1].rmse);
  CHECK(back.steps[1].fallback);
  CHECK_FALSE(back.steps[1].pose_safe);

  CHECK(step_to_json(a, true).contains("plan_time_ms"));
  CHECK_FALSE(step_to_json(a, false).contains("plan_time_ms"));
}

TEST_CASE("occupancy round trip") {
  auto g = test::grid_from_rows({"..#?", "#..?", "?.#."});
  g.set_prob(1, 0.123456789012345);
  const auto dir = scratch_dir("occ");
  const auto path = (dir / "occ.pgm").string();
  write_occupancy(path, g);
  const OccupancyGrid back = read_occupancy(path);
  CHECK(back.lattice().width == 4);
  CHECK(back.lattice().height == 3);
  for (int i = 0; i < g.lattice().size(); ++i) CHECK(back.prob(i) == g.prob(i));

  std::ifstream pgm(path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  std::string comment;
  pgm >> magic;
  pgm >> std::ws;
  if (pgm.peek() == '#') std::getline(pgm, comment);
  pgm >> w >> h >> maxval;
  CHECK(magic == "P2");
  CHECK(w == 4);
  CHECK(h == 3);
  CHECK(maxval == 255);
  int first = -1;
  pgm >> first;  // top-left cell is free
  CHECK(first == 255);
  std::filesystem::remove_all(dir);
}

TEST_CASE("posterior csv") {
  const auto g = test::open_grid(3, 2);
  GasMap m(g.lattice());
  m.rebuild_structure(g);
  std::stringstream ss;
  write_posterior_csv(ss, m.solve_dense());
  std::string line;
  std::getline(ss, line);
  CHECK(line == "# schema: gdm.posterior/1");
  std::getline(ss, line);
  CHECK(line == "cell,ix,iy,x,y,mean,variance,prior_variance");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 6);
}

TEST_CASE("missing files") {
  CHECK_THROWS(read_occupancy("/nonexistent/occ.pgm"));
  std::stringstream empty;
  CHECK_THROWS(read_step_log(empty));
}

}  // TEST_SUITE
