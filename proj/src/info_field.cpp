#include "gdm/info_field.hpp"

#include <algorithm>

namespace gdm {

namespace {

InfoField empty_field(const Lattice& lattice, const KnownFreeSet& free) {
  InfoField f;
  f.lattice = lattice;
  f.cells = free.cells;
  f.slot.assign(lattice.size(), -1);
  for (std::size_t s = 0; s < f.cells.size(); ++s) f.slot[f.cells[s]] = static_cast<int>(s);
  const auto m = static_cast<Eigen::Index>(f.cells.size());
  f.raw = Eigen::VectorXd::Zero(m);
  f.i_hat = Eigen::VectorXd::Zero(m);
  f.penalty = Eigen::VectorXd::Ones(m);
  return f;
}

}  // namespace

InfoField build_field(const GasPosterior& post, const KnownFreeSet& free, double beta) {
  if (!(beta >= 0.0)) throw PreconditionError("beta must be nonnegative");
  InfoField f = empty_field(post.lattice, free);
  f.beta = beta;
  const auto m = static_cast<Eigen::Index>(f.cells.size());
  if (m == 0) return f;

  Eigen::VectorXd mu(m), eps(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    mu[s] = post.mean_at(f.cells[s]);
    eps[s] = post.variance_at(f.cells[s]);
  }
  const double mu_max = mu.maxCoeff();
  const Eigen::VectorXd mu_tilde = mu_max > 0.0 ? Eigen::VectorXd(mu / mu_max) : Eigen::VectorXd::Zero(m);
  f.raw = mu_tilde + beta * eps;

  const double lo = f.raw.minCoeff();
  const double hi = f.raw.maxCoeff();
  if (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) f.i_hat = (f.raw.array() - lo) / (hi - lo);
  f.penalty = 1.0 - f.i_hat.array();
  return f;
}

InfoField flat_field(const Lattice& lattice, const KnownFreeSet& free) {
  InfoField f = empty_field(lattice, free);
  f.beta = 0.0;
  return f;
}

Eigen::VectorXd mixture_density(const InfoField& field, double epsilon_mix) {
  if (!(epsilon_mix > 0.0 && epsilon_mix <= 1.0)) throw PreconditionError("epsilon_mix must lie in (0, 1]");
  const auto m = field.i_hat.size();
  if (m == 0) return {};
  const double sum = field.i_hat.sum();
  const Eigen::VectorXd informed =
      sum > 0.0 ? Eigen::VectorXd(field.i_hat / sum) : Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  return (1.0 - epsilon_mix) * informed.array() + epsilon_mix / static_cast<double>(m);
}

MixtureSampler::MixtureSampler(const Eigen::VectorXd& weights)
    : tree_(static_cast<std::size_t>(weights.size()) + 1, 0.0), weight_(weights.data(), weights.data() + weights.size()) {
  const int n = static_cast<int>(weight_.size());
  for (int i = 0; i < n; ++i) {
    if (!(weight_[i] >= 0.0)) throw PreconditionError("sampling weights must be nonnegative");
    tree_[i + 1] += weight_[i];
    const int parent = (i + 1) + ((i + 1) & -(i + 1));
    if (parent <= n) tree_[parent] += tree_[i + 1];
  }
  while (top_bit_ * 2 <= n) top_bit_ *= 2;
  total_ = prefix(n);
}

double MixtureSampler::prefix(int count) const {
  double s = 0.0;
  for (int i = count; i > 0; i -= i & -i) s += tree_[i];
  return s;
}

void MixtureSampler::remove(int index) {
  const double w = weight_[index];
  if (w == 0.0) return;
  weight_[index] = 0.0;
  const int n = static_cast<int>(weight_.size());
  for (int i = index + 1; i <= n; i += i & -i) tree_[i] -= w;
  total_ = prefix(n);
}

int MixtureSampler::draw(std::mt19937_64& rng) const {
  const int n = static_cast<int>(weight_.size());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (;;) {
    double u = uni(rng) * total_;
    int pos = 0;
    for (int step = top_bit_; step > 0; step /= 2) {
      const int next = pos + step;
      if (next <= n && tree_[next] <= u) {
        pos = next;
        u -= tree_[next];
      }
    }
    // Rounding can land on an exhausted slot; redraw in that case.
    if (pos < n && weight_[pos] > 0.0) return pos;
  }
}

SampleBatch informed_sample(const InfoField& field, int n, double epsilon_mix, std::span<const int> exclude,
                            std::mt19937_64& rng) {
  if (n < 1) throw PreconditionError("batch size must be at least 1");
  SampleBatch batch;
  batch.epsilon_mix = epsilon_mix;
  Eigen::VectorXd q = mixture_density(field, epsilon_mix);

  int eligible = static_cast<int>(q.size());
  for (int c : exclude) {
    if (field.contains(c) && q[field.slot[c]] > 0.0) {
      q[field.slot[c]] = 0.0;
      --eligible;
    }
  }
  if (eligible <= 0) throw EmptyBatchError("no eligible free cells to sample");

  if (eligible <= n) {
    batch.exhausted = eligible < n;
    for (Eigen::Index s = 0; s < q.size(); ++s) {
      if (q[s] <= 0.0) continue;
      batch.cells.push_back(field.cells[s]);
      batch.states.push_back(field.lattice.center(field.cells[s]));
    }
    return batch;
  }

  // Drawing i.i.d. and rejecting repeats is equivalent to drawing from the
  // remaining mass, which is what removal does.
  MixtureSampler sampler(q);
  batch.cells.reserve(n);
  batch.states.reserve(n);
  for (int k = 0; k < n; ++k) {
    const int s = sampler.draw(rng);
    sampler.remove(s);
    batch.cells.push_back(field.cells[s]);
    batch.states.push_back(field.lattice.center(field.cells[s]));
  }
  return batch;
}

}  // namespace gdm
