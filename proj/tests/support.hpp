#pragma once

#include "gdm/grid.hpp"

#include <string>
#include <vector>

namespace gdm::test {

// Rows are given top (highest y) first. '#' occupied, '?' unknown, anything
// else free.
inline OccupancyGrid grid_from_rows(const std::vector<std::string>& rows, double res = 0.1) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  OccupancyGrid g(Lattice(Point::Zero(), res, w, h));
  for (int r = 0; r < h; ++r)
    for (int x = 0; x < w; ++x) {
      const char ch = rows[r][x];
      const int i = g.lattice().index({x, h - 1 - r});
      g.set_prob(i, ch == '#' ? 1.0 : ch == '?' ? 0.5 : 0.0);
    }
  return g;
}

inline OccupancyGrid open_grid(int w, int h, double res = 0.1) {
  OccupancyGrid g(Lattice(Point::Zero(), res, w, h));
  for (int i = 0; i < g.lattice().size(); ++i) g.set_prob(i, 0.0);
  return g;
}

}  // namespace gdm::test
