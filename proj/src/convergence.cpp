#include "gdm/convergence.hpp"

#include "gdm/oracle.hpp"

#include <algorithm>

namespace gdm {

ConvergenceCase make_convergence_case(const Scenario& s) {
  if (!s.goal) throw PreconditionError("scenario '" + s.name + "' has no convergence goal");
  const Lattice lat = s.lattice();
  const std::vector<char> truth_free = truth_free_mask(s);
  OccupancyGrid known(lat, s.tau_free, s.tau_occ);
  for (int i = 0; i < lat.size(); ++i) known.set_prob(i, truth_free[i] ? 0.0 : 1.0);

  ConvergenceCase c{s.name, inflate(known, s.inflation), {}, {}, s.start.position, Point::Zero()};
  c.free = known_free(c.grid);

  const GroundTruthField truth(s);
  GasPosterior post;
  post.lattice = lat;
  post.cells = c.free.cells;
  post.slot.assign(lat.size(), -1);
  const auto m = static_cast<Eigen::Index>(post.cells.size());
  post.mean.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    post.slot[post.cells[k]] = static_cast<int>(k);
    post.mean[k] = truth(lat.center(post.cells[k]));
  }
  post.variance = Eigen::VectorXd::Zero(m);
  post.prior_variance = Eigen::VectorXd::Zero(m);
  c.field = build_field(post, c.free, 0.0);

  const int goal_cell = index_of(lat, *s.goal);
  if (!c.free.contains(goal_cell)) throw PreconditionError("convergence goal is not free after inflation");
  c.goal = lat.center(goal_cell);
  if (!c.grid.is_free(c.start)) throw PreconditionError("convergence start is not free after inflation");
  return c;
}

double convergence_radius(const ConvergenceCase& c, const PlannerConfig& cfg, int n) {
  return connection_radius(n, c.free.lebesgue_measure, 2, cfg.gamma_scale, cfg.epsilon_mix);
}

double plan_once(const ConvergenceCase& c, const PlannerConfig& cfg, double alpha, int n, std::uint64_t seed) {
  const Lattice& lat = c.grid.lattice();
  const int goal_cell = index_of(lat, c.goal);
  const int exclude[] = {index_of(lat, c.start), goal_cell};
  auto rng = make_rng(seed, static_cast<std::uint64_t>(n), 7);
  SampleBatch batch = informed_sample(c.field, n, cfg.epsilon_mix, exclude, rng);
  batch.states.push_back(c.goal);
  batch.cells.push_back(goal_cell);

  Frontier goal;
  goal.cells = {goal_cell};
  goal.centroid = c.goal;
  const Frontier goals[] = {goal};
  const CostModel cost(c.grid, c.field, alpha);
  const PlanResult res = plan(batch, c.start, make_goal_regions(batch, goals, 1), cost,
                              convergence_radius(c, cfg, n), cfg.heuristic);
  return res.trajectories.empty() ? kInf : select_nbt(res.trajectories).cost;
}

double oracle_cost(const ConvergenceCase& c, const PlannerConfig& cfg, double alpha, int n_ref) {
  const CostModel cost(c.grid, c.field, alpha);
  return grid_oracle(cost, c.start, c.goal, convergence_radius(c, cfg, n_ref)).cost;
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceCase& c, const PlannerConfig& cfg, double alpha,
                                              std::span<const int> ns, std::span<const std::uint64_t> seeds) {
  if (ns.empty()) throw PreconditionError("sample count list is empty");
  std::vector<ConvergenceRow> rows;
  for (int n : ns)
    for (std::uint64_t seed : seeds) rows.push_back({n, seed, plan_once(c, cfg, alpha, n, seed)});
  return rows;
}

double median(std::vector<double> v) {
  if (v.empty()) throw PreconditionError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace gdm
