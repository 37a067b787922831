#include "doctest.h"

#include "frontier_oracle.hpp"
#include "support.hpp"

#include "gdm/frontier.hpp"

#include <random>
#include <set>

using namespace gdm;
using namespace gdm::test;

namespace {

GasKnowledgePartition partition_of(const GasPosterior& p) { return partition_knowledge(p, 0.9); }

}  // namespace

TEST_SUITE("frontier") {

TEST_CASE("occupancy frontiers") {
  CHECK(detect_occ_frontiers(open_grid(8, 8), 1).empty());

  const auto corridor = grid_from_rows({
      "##########",
      ".....?????",
      ".....?????",
      ".....?????",
      "##########",
  });
  const auto one = detect_occ_frontiers(corridor, 1);
  REQUIRE(one.size() == 1);
  CHECK(as_sets(one) == occ_frontier_oracle(corridor, 1));
  for (int c : one.front().cells) CHECK(corridor.lattice().cell(c).ix == 4);

  const auto pockets = grid_from_rows({
      "..........",
      ".??.......",
      ".??.......",
      "..........",
      "......???.",
      "..........",
  });
  CHECK(detect_occ_frontiers(pockets, 1).size() == 2);
  CHECK(as_sets(detect_occ_frontiers(pockets, 1)) == occ_frontier_oracle(pockets, 1));
}

TEST_CASE("occupancy frontiers match the exhaustive scan on random maps") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(5, 30);
  std::discrete_distribution<int> state({6, 2, 2});
  for (int k = 0; k < 100; ++k) {
    OccupancyGrid g(Lattice(Point::Zero(), 0.1, dim(rng), dim(rng)));
    for (int i = 0; i < g.lattice().size(); ++i) g.set_prob(i, std::array{0.0, 0.5, 1.0}[state(rng)]);
    for (int m : {1, 3}) CHECK(as_sets(detect_occ_frontiers(g, m)) == occ_frontier_oracle(g, m));
  }
}

TEST_CASE("centroids are snapped to free cells") {
  const auto g = grid_from_rows({
      "..........",
      ".########.",
      ".########.",
      "..........",
  });
  const int cells[] = {g.lattice().index({0, 0}), g.lattice().index({9, 3})};
  const Point c = frontier_centroid(g, cells);
  CHECK(g.is_free(c));
}

TEST_CASE("dynamic threshold") {
  const Lattice lat(Point::Zero(), 0.1, 4, 1);
  {
    const auto p = labelled_posterior(lat, {1.0, 1.5, 0.5, 1.9}, {1, 1, 1, 1});
    CHECK(dynamic_threshold(p, partition_of(p), 10.0, 2.0).tau_gas == 2.0);
  }
  {
    const auto p = labelled_posterior(lat, {10, 10, 10, 10}, {1, 1, 1, 1});
    CHECK(dynamic_threshold(p, partition_of(p), 10.0, 2.0).tau_gas == 10.0);
  }
  {
    const auto p = labelled_posterior(lat, {50, 50, 50, 50}, {0, 0, 0, 0});
    const auto thr = dynamic_threshold(p, partition_of(p), 10.0, 2.0);
    CHECK(thr.q_p == 0.0);
    CHECK(thr.tau_gas == 2.0);
  }
  {
    // Nearest rank: the 50th percentile of {1,2,3,4} is the 2nd value.
    const auto p = labelled_posterior(lat, {4, 1, 3, 2}, {1, 1, 1, 1});
    CHECK(dynamic_threshold(p, partition_of(p), 50.0, 0.5).q_p == 2.0);
  }
}

TEST_CASE("gas frontier cell predicate") {
  const Lattice lat(Point::Zero(), 0.1, 3, 1);
  const auto p = labelled_posterior(lat, {5, 0, 0}, {1, 0, 1});
  const auto part = partition_of(p);
  const std::vector<char> crit{1, 0, 0};
  std::vector<char> flagged(3, 0);
  CHECK_FALSE(is_new_gas_frontier_cell(lat, 0, part, crit, flagged));
  CHECK(is_new_gas_frontier_cell(lat, 1, part, crit, flagged));
  flagged[1] = 1;
  CHECK_FALSE(is_new_gas_frontier_cell(lat, 1, part, crit, flagged));
}

TEST_CASE("gas frontier hand traces") {
  const Lattice lat(Point::Zero(), 0.1, 3, 3);
  const auto occ = open_grid(3, 3);
  const GasThreshold thr{2.0, 0.0, 10.0, 2.0};
  // Centre critical, cell (2,1) unknown, the rest observed and subcritical.
  std::vector<double> mean(9, 0.5);
  std::vector<char> observed(9, 1);
  mean[4] = 10.0;
  observed[5] = 0;
  const auto p = labelled_posterior(lat, mean, observed);
  const auto part = partition_of(p);
  const auto fs = detect_gas_frontiers(p, occ, part, lat.center(4), thr, 1);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].cells == std::vector<int>{5});
  CHECK(fs[0].kind == FrontierKind::Gas);

  // Robot below threshold: nothing.
  CHECK(detect_gas_frontiers(p, occ, part, lat.center(0), thr, 1).empty());

  // Two-cell frontier under a size floor of 3.
  observed[2] = 0;
  const auto p2 = labelled_posterior(lat, mean, observed);
  CHECK(detect_gas_frontiers(p2, occ, partition_of(p2), lat.center(4), thr, 3).empty());
  CHECK(detect_gas_frontiers(p2, occ, partition_of(p2), lat.center(4), thr, 2).size() == 1);
}

TEST_CASE("gas frontier detection needs the robot in the posterior") {
  const Lattice lat(Point::Zero(), 0.1, 3, 3);
  auto p = labelled_posterior(lat, std::vector<double>(9, 5.0), std::vector<char>(9, 1));
  p.slot[4] = -1;
  CHECK_THROWS_AS(detect_gas_frontiers(p, open_grid(3, 3), partition_of(p), lat.center(4), GasThreshold{}, 1),
                  PreconditionError);
}

TEST_CASE("gas frontiers match the oracle on random maps") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> dim(3, 25);
  std::bernoulli_distribution observed_draw(0.6), critical_draw(0.5);
  std::uniform_int_distribution<int> size_draw(1, 3);
  int nonempty = 0;
  for (int k = 0; k < 60; ++k) {
    const Lattice lat(Point::Zero(), 0.1, dim(rng), dim(rng));
    std::vector<double> mean(lat.size());
    std::vector<char> observed(lat.size());
    for (int c = 0; c < lat.size(); ++c) {
      observed[c] = observed_draw(rng);
      mean[c] = critical_draw(rng) ? 6.0 : 1.0;
    }
    std::uniform_int_distribution<int> pick(0, lat.size() - 1);
    const int robot = pick(rng);
    observed[robot] = 1;
    mean[robot] = 6.0;
    const auto p = labelled_posterior(lat, mean, observed);
    const auto part = partition_of(p);
    const GasThreshold thr{2.0, 0.0, 10.0, 2.0};
    const int m = size_draw(rng);
    const auto got = as_sets(detect_gas_frontiers(p, open_grid(lat.width, lat.height), part, lat.center(robot), thr, m));
    CHECK(got == gas_frontier_oracle(p, part, robot, thr.tau_gas, m));
    nonempty += !got.empty();
  }
  CHECK(nonempty > 20);
}

TEST_CASE("gas frontier store") {
  const Lattice lat(Point::Zero(), 0.1, 6, 3);
  const auto occ = open_grid(6, 3);
  std::vector<double> mean(lat.size(), 6.0);
  std::vector<char> observed(lat.size(), 1);
  for (int ix = 3; ix < 6; ++ix)
    for (int iy = 0; iy < 3; ++iy) observed[lat.index({ix, iy})] = 0;
  auto p = labelled_posterior(lat, mean, observed);
  auto part = partition_of(p);
  const GasThreshold thr{2.0, 0.0, 10.0, 2.0};
  auto crit = critical_mask(p, part, thr);

  GasFrontierStore store;
  const auto found = detect_gas_frontiers(p, occ, part, lat.center(0), thr, 3);
  REQUIRE(found.size() == 1);
  store.merge(found, occ, 0);
  REQUIRE(store.live().size() == 1);
  const int id = store.live()[0].id;

  // Untouched.
  store.revalidate(part, crit, occ, 3);
  REQUIRE(store.live().size() == 1);
  CHECK(store.live()[0].cells == found[0].cells);

  // Overlapping detection merges.
  Frontier extra = found[0];
  extra.cells = {found[0].cells.front(), lat.index({4, 0})};
  const Frontier batch[] = {extra};
  store.merge(batch, occ, 1);
  REQUIRE(store.live().size() == 1);
  CHECK(store.live()[0].id == id);
  CHECK(store.live()[0].size() == found[0].size() + 1);

  // Everything observed now: retired.
  p = labelled_posterior(lat, mean, std::vector<char>(lat.size(), 1));
  part = partition_of(p);
  crit = critical_mask(p, part, thr);
  store.revalidate(part, crit, occ, 3);
  CHECK(store.live().empty());
  CHECK(store.resolved().size() == 1);
}

TEST_CASE("goal selection") {
  std::vector<Frontier> gas(3), occ(4);
  for (int i = 0; i < 3; ++i) {
    gas[i].kind = FrontierKind::Gas;
    gas[i].id = 100 + i;
  }
  for (int i = 0; i < 4; ++i) occ[i].id = i;
  std::mt19937_64 rng(4);

  const auto gff = select_goals(GoalPolicy::GFF, occ, gas, 5, rng);
  REQUIRE(gff.size() == 5);
  for (int i = 0; i < 3; ++i) CHECK(gff[i].kind == FrontierKind::Gas);
  for (int i = 3; i < 5; ++i) CHECK(gff[i].kind == FrontierKind::Occupancy);

  const auto fgf = select_goals(GoalPolicy::FGF, occ, gas, 5, rng);
  for (int i = 0; i < 4; ++i) CHECK(fgf[i].kind == FrontierKind::Occupancy);
  CHECK(fgf[4].kind == FrontierKind::Gas);

  for (auto policy : {GoalPolicy::F, GoalPolicy::FGF, GoalPolicy::GFF}) {
    const auto only = select_goals(policy, occ, {}, 5, rng);
    CHECK(only.size() == 4);
    CHECK(select_goals(policy, {}, {}, 5, rng).empty());
    for (int m = 1; m <= 8; ++m) {
      const auto s = select_goals(policy, occ, gas, m, rng);
      CHECK(static_cast<int>(s.size()) <= m);
      std::set<std::pair<int, int>> ids;
      for (const auto& f : s) ids.insert({static_cast<int>(f.kind), f.id});
      CHECK(ids.size() == s.size());
    }
  }
  CHECK_THROWS_AS(select_goals(GoalPolicy::GFF, occ, gas, 0, rng), PreconditionError);

  std::mt19937_64 a(9), b(9);
  const auto x = select_goals(GoalPolicy::F, occ, gas, 2, a);
  const auto y = select_goals(GoalPolicy::F, occ, gas, 2, b);
  CHECK(x[0].id == y[0].id);
  CHECK(x[1].id == y[1].id);
}

}  // TEST_SUITE
