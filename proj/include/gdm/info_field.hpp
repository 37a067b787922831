#pragma once

#include "gdm/gas.hpp"
#include "gdm/grid.hpp"

#include <Eigen/Core>

#include <random>
#include <span>
#include <vector>

namespace gdm {

/// Normalised UCB field over a set of free cells. Cells outside the set
/// carry penalty 1 (no information).
struct InfoField {
  Lattice lattice;
  std::vector<int> cells;      // lattice indices, ascending
  std::vector<int> slot;       // lattice index -> position in `cells`, or -1
  Eigen::VectorXd raw;         // mu_tilde + beta * variance
  Eigen::VectorXd i_hat;       // in [0, 1]
  Eigen::VectorXd penalty;     // 1 - i_hat
  double beta = 1.0;

  bool contains(int cell) const { return cell >= 0 && cell < static_cast<int>(slot.size()) && slot[cell] >= 0; }
  double i_hat_at(int cell) const { return contains(cell) ? i_hat[slot[cell]] : 0.0; }
  double penalty_at(int cell) const { return contains(cell) ? penalty[slot[cell]] : 1.0; }
  double min_penalty() const { return penalty.size() ? penalty.minCoeff() : 1.0; }
};

InfoField build_field(const GasPosterior& post, const KnownFreeSet& free, double beta);

/// Uniform penalty field (penalty 1 on every free cell): Euclidean planning
/// with alpha = 0 degenerates to counting supersample points.
InfoField flat_field(const Lattice& lattice, const KnownFreeSet& free);

struct SampleBatch {
  std::vector<Point> states;  // cell centres
  std::vector<int> cells;
  double epsilon_mix = 0.2;
  bool exhausted = false;     // fewer than N eligible cells were available
};

/// Per-cell probabilities q = (1 - eps) * i_hat / sum(i_hat) + eps / M over the
/// field's cells (uniform density when i_hat sums to zero).
Eigen::VectorXd mixture_density(const InfoField& field, double epsilon_mix);

/// Weighted draws over a fixed index range; removal zeroes an index so that
/// successive draws are without replacement.
class MixtureSampler {
 public:
  explicit MixtureSampler(const Eigen::VectorXd& weights);

  /// Index drawn with probability weight / total. Requires total() > 0.
  int draw(std::mt19937_64& rng) const;
  void remove(int index);
  double total() const { return total_; }
  double weight(int index) const { return weight_[index]; }

 private:
  double prefix(int count) const;

  std::vector<double> tree_;  // Fenwick tree, 1-based
  std::vector<double> weight_;
  double total_ = 0.0;
  int top_bit_ = 1;
};

/// Draws N unique cells from the mixture, skipping `exclude`.
SampleBatch informed_sample(const InfoField& field, int n, double epsilon_mix, std::span<const int> exclude,
                            std::mt19937_64& rng);

}  // namespace gdm
