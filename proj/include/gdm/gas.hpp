#pragma once

#include "gdm/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <vector>

namespace gdm {

/// GMRF hyperparameters (variances in ppm^2). sigma_d2 is used as the
/// precision of the per-cell anchor toward zero.
struct GmrfHyper {
  double sigma_r2 = 3.0;
  double sigma_s2 = 10.0;
  double sigma_zeta2 = 1e10;
  double sigma_d2 = 0.001;

  void validate() const;
  double anchor_precision() const { return sigma_d2; }
  double anchor_variance() const { return 1.0 / sigma_d2; }
  /// Observation variance inflated by age (s).
  double effective_variance(double age) const { return sigma_s2 * (1.0 + age * age / sigma_zeta2); }
};

struct GasObservation {
  Point position = Point::Zero();
  double concentration = 0.0;  // ppm
  double timestamp = 0.0;      // s
};

/// Posterior over the known-free cells the structure was built on.
struct GasPosterior {
  Lattice lattice;
  std::vector<int> cells;       // lattice indices, ascending
  std::vector<int> slot;        // lattice index -> position in `cells`, or -1
  Eigen::VectorXd mean;         // ppm
  Eigen::VectorXd variance;     // ppm^2
  Eigen::VectorXd prior_variance;
  double anchor_variance = 1000.0;

  std::size_t size() const { return cells.size(); }
  bool contains(int cell) const { return cell >= 0 && cell < static_cast<int>(slot.size()) && slot[cell] >= 0; }
  /// Cells outside the structure report the anchor prior (mean 0).
  double mean_at(int cell) const { return contains(cell) ? mean[slot[cell]] : 0.0; }
  double variance_at(int cell) const { return contains(cell) ? variance[slot[cell]] : anchor_variance; }
  double prior_variance_at(int cell) const { return contains(cell) ? prior_variance[slot[cell]] : anchor_variance; }
};

struct GasKnowledgePartition {
  std::vector<int> observed;  // lattice indices, ascending
  std::vector<int> unknown;
  std::vector<char> is_observed;  // lattice-sized
  std::vector<char> is_unknown;   // lattice-sized
};

GasKnowledgePartition partition_knowledge(const GasPosterior& post, double kappa);

struct FactorCounts {
  std::size_t regularization = 0;
  std::size_t anchor = 0;
  std::size_t observation = 0;
};

/// Obstacle-aware lattice GMRF over known-free cells.
class GasMap {
 public:
  explicit GasMap(Lattice lattice, GmrfHyper hyper = {});

  const Lattice& lattice() const { return lattice_; }
  const GmrfHyper& hyper() const { return hyper_; }

  /// Rebuilds the factor graph on the known-free cells of `occ` and replays the
  /// stored observations. Returns false when the free set is unchanged.
  bool rebuild_structure(const OccupancyGrid& occ);

  /// Throws PreconditionError if the observation's cell is not in the structure.
  void add_observation(const GasObservation& obs);
  /// Current time, used to age observations.
  void set_time(double t) { now_ = t; }

  FactorCounts factor_counts() const;
  const std::vector<GasObservation>& observations() const { return observations_; }
  std::size_t free_cell_count() const { return cells_.size(); }
  const std::vector<int>& cells() const { return cells_; }

  /// Means by preconditioned conjugate gradients (relative residual <= tol),
  /// marginal variances by selected inversion of a sparse LDL^T factor.
  GasPosterior solve_iterative(double tol = 1e-12, int max_iters = 5000);
  /// Means only, in structure order. Much cheaper than a full solve.
  Eigen::VectorXd solve_mean(double tol = 1e-12, int max_iters = 5000);
  /// Dense assembly and Cholesky inversion. Refuses above `cap` free cells.
  GasPosterior solve_dense(std::size_t cap = 2500) const;

  /// Precision matrix and information vector over the current structure.
  void assemble(Eigen::SparseMatrix<double>& Q, Eigen::VectorXd& b, bool with_observations = true) const;

 private:
  struct Attached {
    int slot;
    double z;
    double timestamp;
  };

  GasPosterior empty_posterior() const;
  void solve_mean(const Eigen::SparseMatrix<double>& Q, const Eigen::VectorXd& b, double tol, int max_iters);
  const Eigen::VectorXd& prior_variance();

  Lattice lattice_;
  GmrfHyper hyper_;
  double now_ = 0.0;
  std::vector<int> cells_;
  std::vector<int> slot_;
  std::vector<std::pair<int, int>> edges_;  // slot pairs of 4-adjacent free cells
  std::vector<GasObservation> observations_;
  std::vector<Attached> attached_;
  Eigen::VectorXd warm_mean_;
  Eigen::VectorXd prior_var_;
  bool prior_valid_ = false;
};

/// Diagonal of Q^{-1} for a symmetric positive definite sparse Q.
Eigen::VectorXd selected_inverse_diagonal(const Eigen::SparseMatrix<double>& Q);

}  // namespace gdm
