#include "gdm/eval.hpp"

#include <cmath>
#include <numbers>

namespace gdm {

CriticalSet critical_set(const GroundTruthField& truth, const Lattice& lattice, const std::vector<char>& truth_free,
                         double z_thresh) {
  if (!(z_thresh > 0.0)) throw PreconditionError("z_thresh must be positive");
  CriticalSet out;
  out.z_thresh = z_thresh;
  for (int i = 0; i < lattice.size(); ++i) {
    if (!truth_free[i]) continue;
    const double v = truth(lattice.center(i));
    if (v > z_thresh) {
      out.cells.push_back(i);
      out.truth.push_back(v);
    }
  }
  return out;
}

double rmse(const GasPosterior& post, const CriticalSet& crit) {
  if (crit.empty()) throw UndefinedMetricError("RMSE is undefined on an empty critical set");
  double acc = 0.0;
  for (std::size_t k = 0; k < crit.cells.size(); ++k) {
    const double e = post.mean_at(crit.cells[k]) - crit.truth[k];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(crit.cells.size()));
}

double entropy(const GasPosterior& post, const CriticalSet& crit) {
  const double c = 2.0 * std::numbers::pi * std::numbers::e;
  double h = 0.0;
  for (int cell : crit.cells) {
    const double v = post.variance_at(cell);
    if (!(v > 0.0)) throw InvariantError("nonpositive marginal variance");
    h += 0.5 * std::log(c * v);
  }
  return h;
}

double completeness(const OccupancyGrid& occ, const std::vector<char>& truth_free) {
  std::size_t total = 0, known = 0;
  for (int i = 0; i < occ.lattice().size(); ++i) {
    if (!truth_free[i]) continue;
    ++total;
    known += occ.is_free(i);
  }
  if (total == 0) throw PreconditionError("ground truth has no free cells");
  return static_cast<double>(known) / static_cast<double>(total);
}

}  // namespace gdm
