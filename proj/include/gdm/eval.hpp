#pragma once

#include "gdm/gas.hpp"
#include "gdm/grid.hpp"
#include "gdm/scenario.hpp"

#include <vector>

namespace gdm {

struct CriticalSet {
  std::vector<int> cells;  // lattice indices, ascending
  std::vector<double> truth;  // ground truth at each cell centre
  double z_thresh = 2.5;

  bool empty() const { return cells.empty(); }
};

/// Truth-free cells whose ground truth at the centre exceeds z_thresh.
CriticalSet critical_set(const GroundTruthField& truth, const Lattice& lattice, const std::vector<char>& truth_free,
                         double z_thresh);

/// Root mean square error of the posterior mean on the critical set. Cells the
/// posterior does not cover count with mean 0. Throws UndefinedMetricError on
/// an empty set.
double rmse(const GasPosterior& post, const CriticalSet& crit);

/// Sum of 0.5 ln(2 pi e variance) over the critical set, in nats. Cells the
/// posterior does not cover use the anchor variance.
double entropy(const GasPosterior& post, const CriticalSet& crit);

/// |known-free and truth-free| / |truth-free|.
double completeness(const OccupancyGrid& occ, const std::vector<char>& truth_free);

}  // namespace gdm
