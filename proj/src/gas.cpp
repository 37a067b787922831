#include "gdm/gas.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <string>

namespace gdm {

void GmrfHyper::validate() const {
  if (!(sigma_r2 > 0.0 && sigma_s2 > 0.0 && sigma_zeta2 > 0.0 && sigma_d2 > 0.0))
    throw PreconditionError("GMRF hyperparameters must be strictly positive");
}

GasKnowledgePartition partition_knowledge(const GasPosterior& post, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw PreconditionError("kappa must lie in (0, 1]");
  GasKnowledgePartition out;
  out.is_observed.assign(post.lattice.size(), 0);
  out.is_unknown.assign(post.lattice.size(), 0);
  for (std::size_t s = 0; s < post.size(); ++s) {
    const int c = post.cells[s];
    if (post.variance[s] <= kappa * post.prior_variance[s]) {
      out.observed.push_back(c);
      out.is_observed[c] = 1;
    } else {
      out.unknown.push_back(c);
      out.is_unknown[c] = 1;
    }
  }
  return out;
}

GasMap::GasMap(Lattice lattice, GmrfHyper hyper)
    : lattice_(std::move(lattice)), hyper_(hyper), slot_(lattice_.size(), -1) {
  hyper_.validate();
}

bool GasMap::rebuild_structure(const OccupancyGrid& occ) {
  if (occ.lattice().size() != lattice_.size()) throw PreconditionError("occupancy lattice mismatch");
  std::vector<int> cells;
  for (int i = 0; i < lattice_.size(); ++i)
    if (occ.is_free(i)) cells.push_back(i);
  if (cells == cells_ && !cells_.empty()) return false;

  Eigen::VectorXd old_mean = Eigen::VectorXd::Zero(lattice_.size());
  for (std::size_t s = 0; s < cells_.size() && s < static_cast<std::size_t>(warm_mean_.size()); ++s)
    old_mean[cells_[s]] = warm_mean_[s];

  cells_ = std::move(cells);
  std::fill(slot_.begin(), slot_.end(), -1);
  for (std::size_t s = 0; s < cells_.size(); ++s) slot_[cells_[s]] = static_cast<int>(s);

  edges_.clear();
  for (std::size_t s = 0; s < cells_.size(); ++s) {
    const Cell c = lattice_.cell(cells_[s]);
    // Right and up neighbours only, so each unordered pair appears once.
    for (const Cell n : {Cell{c.ix + 1, c.iy}, Cell{c.ix, c.iy + 1}}) {
      if (!lattice_.contains(n)) continue;
      const int t = slot_[lattice_.index(n)];
      if (t >= 0) edges_.emplace_back(static_cast<int>(s), t);
    }
  }

  attached_.clear();
  for (const auto& obs : observations_) {
    const int cell = index_of(lattice_, obs.position);
    if (cell >= 0 && slot_[cell] >= 0) attached_.push_back({slot_[cell], obs.concentration, obs.timestamp});
  }

  warm_mean_.resize(static_cast<Eigen::Index>(cells_.size()));
  for (std::size_t s = 0; s < cells_.size(); ++s) warm_mean_[s] = old_mean[cells_[s]];
  prior_valid_ = false;
  return true;
}

void GasMap::add_observation(const GasObservation& obs) {
  if (!(obs.concentration >= 0.0)) throw PreconditionError("gas concentration must be nonnegative");
  const int cell = index_of(lattice_, obs.position);
  if (cell < 0 || slot_[cell] < 0)
    throw PreconditionError("gas observation outside known-free space");
  observations_.push_back(obs);
  attached_.push_back({slot_[cell], obs.concentration, obs.timestamp});
}

FactorCounts GasMap::factor_counts() const {
  return {edges_.size(), cells_.size(), attached_.size()};
}

void GasMap::assemble(Eigen::SparseMatrix<double>& Q, Eigen::VectorXd& b, bool with_observations) const {
  const int n = static_cast<int>(cells_.size());
  const double wr = 1.0 / hyper_.sigma_r2;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + 4 * edges_.size() + attached_.size());
  for (int s = 0; s < n; ++s) trip.emplace_back(s, s, hyper_.anchor_precision());
  for (auto [s, t] : edges_) {
    trip.emplace_back(s, s, wr);
    trip.emplace_back(t, t, wr);
    trip.emplace_back(s, t, -wr);
    trip.emplace_back(t, s, -wr);
  }
  b = Eigen::VectorXd::Zero(n);
  for (const auto& a : attached_) {
    if (!with_observations) break;
    const double w = 1.0 / hyper_.effective_variance(now_ - a.timestamp);
    trip.emplace_back(a.slot, a.slot, w);
    b[a.slot] += w * a.z;
  }
  Q.resize(n, n);
  Q.setFromTriplets(trip.begin(), trip.end());
}

GasPosterior GasMap::empty_posterior() const {
  GasPosterior post;
  post.lattice = lattice_;
  post.cells = cells_;
  post.slot = slot_;
  post.anchor_variance = hyper_.anchor_variance();
  return post;
}

Eigen::VectorXd selected_inverse_diagonal(const Eigen::SparseMatrix<double>& Q) {
  using SpMat = Eigen::SparseMatrix<double>;
  const Eigen::Index n = Q.rows();
  Eigen::SimplicialLDLT<SpMat> ldlt(Q);
  if (ldlt.info() != Eigen::Success) throw SolverError("sparse LDL^T factorization failed", 0.0);

  // P Q P^T = L D L^T with L unit lower triangular; only strict-lower entries
  // are read below. Row indices within each column are ascending.
  const SpMat& L = ldlt.matrixL().nestedExpression();
  const Eigen::VectorXd D = ldlt.vectorD();

  // Sigma restricted to the pattern of L, stored alongside it.
  std::vector<double> sig(static_cast<std::size_t>(L.nonZeros()), 0.0);
  Eigen::VectorXd diag(n);
  const auto* outer = L.outerIndexPtr();
  const auto* inner = L.innerIndexPtr();
  const auto* val = L.valuePtr();

  auto first_strict = [&](Eigen::Index j) {
    Eigen::Index p = outer[j];
    while (p < outer[j + 1] && inner[p] <= j) ++p;
    return p;
  };
  // Sigma(r, c) for r > c, both inside the filled pattern.
  auto lookup = [&](Eigen::Index r, Eigen::Index c) -> double {
    if (r == c) return diag[r];
    if (r < c) std::swap(r, c);
    const auto* lo = inner + first_strict(c);
    const auto* hi = inner + outer[c + 1];
    const auto* it = std::lower_bound(lo, hi, static_cast<int>(r));
    if (it == hi || *it != r) throw InvariantError("selected inversion left the fill pattern");
    return sig[static_cast<std::size_t>(it - inner)];
  };

  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const Eigen::Index beg = first_strict(j);
    const Eigen::Index end = outer[j + 1];
    for (Eigen::Index p = beg; p < end; ++p) {
      const Eigen::Index i = inner[p];
      double acc = 0.0;
      for (Eigen::Index q = beg; q < end; ++q) acc += val[q] * lookup(inner[q], i);
      sig[static_cast<std::size_t>(p)] = -acc;
    }
    double acc = 0.0;
    for (Eigen::Index p = beg; p < end; ++p) acc += val[p] * sig[static_cast<std::size_t>(p)];
    diag[j] = 1.0 / D[j] - acc;
  }

  const auto& perm = ldlt.permutationP().indices();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = diag[perm[i]];
  return out;
}

const Eigen::VectorXd& GasMap::prior_variance() {
  if (!prior_valid_) {
    Eigen::SparseMatrix<double> Q;
    Eigen::VectorXd b;
    assemble(Q, b, false);
    prior_var_ = cells_.empty() ? Eigen::VectorXd() : selected_inverse_diagonal(Q);
    prior_valid_ = true;
  }
  return prior_var_;
}

Eigen::VectorXd GasMap::solve_mean(double tol, int max_iters) {
  if (cells_.empty()) return {};
  Eigen::SparseMatrix<double> Q;
  Eigen::VectorXd b;
  assemble(Q, b);
  solve_mean(Q, b, tol, max_iters);
  return warm_mean_;
}

void GasMap::solve_mean(const Eigen::SparseMatrix<double>& Q, const Eigen::VectorXd& b, double tol,
                        int max_iters) {
  if (b.squaredNorm() == 0.0) {
    warm_mean_ = Eigen::VectorXd::Zero(Q.rows());
    return;
  }
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iters);
  cg.compute(Q);
  if (cg.info() != Eigen::Success) throw SolverError("preconditioner construction failed", 0.0);
  Eigen::VectorXd x = cg.solveWithGuess(b, warm_mean_);
  if (cg.info() != Eigen::Success)
    throw SolverError("conjugate gradients stopped after " + std::to_string(cg.iterations()) + " iterations",
                      cg.error());
  warm_mean_ = std::move(x);
}

GasPosterior GasMap::solve_iterative(double tol, int max_iters) {
  GasPosterior post = empty_posterior();
  if (cells_.empty()) return post;
  post.prior_variance = prior_variance();

  Eigen::SparseMatrix<double> Q;
  Eigen::VectorXd b;
  assemble(Q, b);
  solve_mean(Q, b, tol, max_iters);
  post.mean = warm_mean_;

  post.variance = attached_.empty() ? post.prior_variance : selected_inverse_diagonal(Q);
  // Cells far from every observation can land a few ulps above the prior.
  post.variance = post.variance.cwiseMin(post.prior_variance);
  return post;
}

GasPosterior GasMap::solve_dense(std::size_t cap) const {
  if (cells_.size() > cap)
    throw CapacityError("dense solve refused: " + std::to_string(cells_.size()) + " free cells exceed cap " +
                        std::to_string(cap));
  GasPosterior post = empty_posterior();
  if (cells_.empty()) return post;

  Eigen::SparseMatrix<double> Qs;
  Eigen::VectorXd b;
  assemble(Qs, b);
  const Eigen::MatrixXd Q(Qs);
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) throw SolverError("dense Cholesky failed", 0.0);
  post.mean = llt.solve(b);
  post.variance = llt.solve(Eigen::MatrixXd::Identity(Q.rows(), Q.cols())).diagonal();

  assemble(Qs, b, false);
  Eigen::LLT<Eigen::MatrixXd> llt0{Eigen::MatrixXd(Qs)};
  post.prior_variance = llt0.solve(Eigen::MatrixXd::Identity(Q.rows(), Q.cols())).diagonal();
  return post;
}

}  // namespace gdm
