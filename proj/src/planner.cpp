#include "gdm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gdm {

double unit_ball_volume(int dim) {
  if (dim < 1) throw PreconditionError("dimension must be positive");
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

double rgg_gamma(double lebesgue_free, int dim) {
  if (!(lebesgue_free > 0.0)) throw PreconditionError("free-space measure must be positive");
  const double inv = 1.0 / dim;
  return 2.0 * std::pow(1.0 + inv, inv) * std::pow(lebesgue_free / unit_ball_volume(dim), inv);
}

double connection_radius(int n_samples, double gamma, int dim) {
  if (n_samples < 2) throw PreconditionError("connection radius needs at least two samples");
  const double n = n_samples;
  return gamma * std::pow(std::log(n) / n, 1.0 / dim);
}

double connection_radius(int n_samples, double lebesgue_free, int dim, double gamma_scale, double epsilon_mix) {
  if (!(epsilon_mix > 0.0 && epsilon_mix <= 1.0)) throw PreconditionError("epsilon_mix must lie in (0, 1]");
  const double gamma = gamma_scale * std::pow(epsilon_mix, -1.0 / dim) * rgg_gamma(lebesgue_free, dim);
  return connection_radius(n_samples, gamma, dim);
}

CostModel::CostModel(const OccupancyGrid& grid, const InfoField* field, double alpha)
    : grid_(&grid), field_(field), alpha_(alpha), step_(segment_step(grid.lattice())) {
  if (!(alpha >= 0.0)) throw PreconditionError("alpha must be nonnegative");
  if (field_) min_penalty_ = std::clamp(field_->min_penalty(), 0.0, 1.0);
}

CostModel::CostModel(const OccupancyGrid& grid, const InfoField& field, double alpha)
    : CostModel(grid, &field, alpha) {}

CostModel CostModel::euclidean(const OccupancyGrid& grid, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("distance-only cost needs alpha > 0");
  return CostModel(grid, nullptr, alpha);
}

namespace {

// Orders the endpoints so that c(a, b) and c(b, a) sum the same points in
// the same order.
bool swap_endpoints(const Point& a, const Point& b) {
  return b.x() < a.x() || (b.x() == a.x() && b.y() < a.y());
}

}  // namespace

double CostModel::cost(const Point& a0, const Point& b0) const {
  const bool sw = swap_endpoints(a0, b0);
  const Point& a = sw ? b0 : a0;
  const Point& b = sw ? a0 : b0;
  double sum = 0.0, first = -1.0, last = 0.0;
  bool blocked = false;
  trace_segment(grid_->lattice(), a, b, step_, [&](const Point&, int cell) {
    if (cell < 0 || !grid_->is_free(cell)) {
      blocked = true;
      return false;
    }
    if (field_) {
      last = field_->penalty_at(cell);
      if (first < 0.0) first = last;
      sum += last;
    }
    return true;
  });
  if (blocked) return kInf;
  if (field_) sum -= 0.5 * (first + last);
  return sum + alpha_ * (b - a).norm();
}

double CostModel::estimate(const Point& a, const Point& b) const {
  const double len = (b - a).norm();
  const double info = field_ ? (segment_point_count(len, step_) - 1) * min_penalty_ : 0.0;
  return info + alpha_ * len;
}

double CostModel::penalty_sum(const Point& a0, const Point& b0) const {
  if (!field_) return 0.0;
  const bool sw = swap_endpoints(a0, b0);
  const Point& a = sw ? b0 : a0;
  const Point& b = sw ? a0 : b0;
  double sum = 0.0, first = -1.0, last = 0.0;
  trace_segment(grid_->lattice(), a, b, step_, [&](const Point&, int cell) {
    last = field_->penalty_at(cell);
    if (first < 0.0) first = last;
    sum += last;
    return true;
  });
  return sum - 0.5 * (first + last);
}

double edge_cost(const Point& a, const Point& b, const InfoField& field, double alpha, const OccupancyGrid& grid) {
  return CostModel(grid, field, alpha).cost(a, b);
}

std::string_view to_string(HeuristicMode mode) {
  return mode == HeuristicMode::UcbAware ? "ucb_aware" : "distance_only";
}

std::optional<HeuristicMode> parse_heuristic_mode(std::string_view name) {
  if (name == "distance_only") return HeuristicMode::DistanceOnly;
  if (name == "ucb_aware") return HeuristicMode::UcbAware;
  return std::nullopt;
}

std::string_view to_string(CostKind kind) { return kind == CostKind::Euclidean ? "euclidean" : "ucb"; }

std::optional<CostKind> parse_cost_kind(std::string_view name) {
  if (name == "ucb") return CostKind::Ucb;
  if (name == "euclidean") return CostKind::Euclidean;
  return std::nullopt;
}

void PlannerConfig::validate() const {
  if (n_samples < 2) throw PreconditionError("batch size N must be at least 2");
  if (max_goals < 1) throw PreconditionError("max_goals must be at least 1");
  if (k_n < 1) throw PreconditionError("k_n must be at least 1");
  if (!(epsilon_mix > 0.0 && epsilon_mix <= 1.0)) throw PreconditionError("epsilon_mix must lie in (0, 1]");
  if (!(alpha >= 0.0)) throw PreconditionError("alpha must be nonnegative");
  if (!(beta >= 0.0)) throw PreconditionError("beta must be nonnegative");
  if (!(gamma_scale > 1.0)) throw PreconditionError("gamma_scale must exceed 1");
}

std::vector<GoalRegion> make_goal_regions(const SampleBatch& batch, std::span<const Frontier> frontiers, int k_n) {
  if (k_n < 1) throw PreconditionError("k_n must be at least 1");
  std::vector<GoalRegion> out;
  const std::size_t n = batch.states.size();
  std::vector<std::size_t> order(n);
  for (const auto& f : frontiers) {
    GoalRegion goal;
    goal.nominal = f.centroid;
    goal.frontier_id = f.id;
    goal.kind = f.kind;
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_n), n);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double da = (batch.states[a] - f.centroid).squaredNorm();
                        const double db = (batch.states[b] - f.centroid).squaredNorm();
                        if (da != db) return da < db;
                        return batch.cells[a] < batch.cells[b];
                      });
    for (std::size_t i = 0; i < k; ++i) goal.members.push_back(static_cast<int>(order[i]) + 1);
    out.push_back(std::move(goal));
  }
  return out;
}

double heuristic(const Point& x, const GoalRegion& goal, std::span<const Point> vertices, HeuristicMode mode,
                 const CostModel& cost) {
  if (goal.members.empty()) throw PreconditionError("goal region has no members");
  double best = kInf;
  for (int m : goal.members) {
    const Point& y = vertices[m];
    const double d = (y - x).norm();
    const double h = mode == HeuristicMode::DistanceOnly ? cost.alpha() * d : cost.penalty_sum(x, y) + cost.alpha() * d;
    best = std::min(best, h);
  }
  return best;
}

int SearchTree::vertex_count() const {
  return static_cast<int>(std::count(in_tree.begin(), in_tree.end(), char{1}));
}

std::vector<int> SearchTree::path_to(int v) const {
  std::vector<int> path;
  for (int u = v; u >= 0; u = parent[u]) {
    path.push_back(u);
    if (static_cast<int>(path.size()) > size()) throw InvariantError("cycle in search tree");
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double Trajectory::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) len += (waypoints[i] - waypoints[i - 1]).norm();
  return len;
}

PlanResult plan(const SampleBatch& batch, const Point& root, std::vector<GoalRegion> goals, const CostModel& cost,
                double radius, HeuristicMode mode) {
  PlanResult res;
  res.radius = radius;
  SearchTree& t = res.tree;
  const int n = static_cast<int>(batch.states.size()) + 1;
  t.points.reserve(n);
  t.points.push_back(root);
  t.points.insert(t.points.end(), batch.states.begin(), batch.states.end());
  t.g.assign(n, kInf);
  t.parent.assign(n, -1);
  t.edge_cost.assign(n, 0.0);
  t.children.assign(n, {});
  t.in_tree.assign(n, 0);
  t.g[0] = 0.0;
  t.in_tree[0] = 1;
  res.goals = std::move(goals);
  auto& G = res.goals;
  if (G.empty()) return res;

  const int ng = static_cast<int>(G.size());
  std::vector<std::vector<double>> hcache(ng, std::vector<double>(n, -1.0));
  auto h = [&](int gi, int v) {
    double& slot = hcache[gi][v];
    if (slot < 0.0) slot = heuristic(t.points[v], G[gi], t.points, mode, cost);
    return slot;
  };
  std::vector<std::vector<char>> is_member(ng, std::vector<char>(n, 0));
  for (int gi = 0; gi < ng; ++gi)
    for (int m : G[gi].members) is_member[gi][m] = 1;
  auto solved = [&](int gi) {
    return std::any_of(G[gi].members.begin(), G[gi].members.end(), [&](int m) { return t.g[m] < kInf; });
  };
  auto all_solved = [&] {
    for (int gi = 0; gi < ng; ++gi)
      if (!solved(gi)) return false;
    return true;
  };

  std::vector<int> qv{0};  // insertion order doubles as the FIFO tie-break
  const double r2 = radius * radius;
  std::vector<std::pair<double, int>> qe;
  std::vector<int> stack;

  while (!qv.empty() && !all_solved()) {
    for (int gi = 0; gi < ng; ++gi) {
      if (solved(gi)) continue;
      if (qv.empty()) break;

      std::size_t best = 0;
      double best_f = t.g[qv[0]] + h(gi, qv[0]);
      for (std::size_t i = 1; i < qv.size(); ++i) {
        const double f = t.g[qv[i]] + h(gi, qv[i]);
        if (f < best_f) {
          best_f = f;
          best = i;
        }
      }
      const int vm = qv[best];
      qv.erase(qv.begin() + static_cast<std::ptrdiff_t>(best));
      ++res.stats.expansions;

      const Point& pv = t.points[vm];
      qe.clear();
      for (int w = 1; w < n; ++w) {
        if (w == vm || (t.points[w] - pv).squaredNorm() > r2) continue;
        qe.emplace_back(cost.estimate(pv, t.points[w]) + h(gi, w), w);
      }
      std::stable_sort(qe.begin(), qe.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      res.stats.edges_queued += static_cast<int>(qe.size());

      for (const auto& [key, w] : qe) {
        const double gv = t.g[vm];
        if (!(gv + cost.estimate(pv, t.points[w]) < t.g[w])) continue;
        const double c = cost.cost(pv, t.points[w]);
        ++res.stats.collision_checks;
        if (!(gv + c < t.g[w])) continue;

        if (t.in_tree[w]) {
          auto& sib = t.children[t.parent[w]];
          sib.erase(std::find(sib.begin(), sib.end(), w));
          ++res.stats.rewires;
        } else {
          t.in_tree[w] = 1;
          qv.push_back(w);
        }
        t.parent[w] = vm;
        t.edge_cost[w] = c;
        t.children[vm].push_back(w);
        t.g[w] = gv + c;
        // Cost-to-come of the rewired subtree follows its new root.
        stack.assign(t.children[w].begin(), t.children[w].end());
        while (!stack.empty()) {
          const int u = stack.back();
          stack.pop_back();
          t.g[u] = t.g[t.parent[u]] + t.edge_cost[u];
          stack.insert(stack.end(), t.children[u].begin(), t.children[u].end());
        }
        if (is_member[gi][w]) break;
      }
    }
  }

  for (int gi = 0; gi < ng; ++gi) {
    auto& goal = G[gi];
    int best = -1;
    for (int m : goal.members)
      if (t.g[m] < kInf && (best < 0 || t.g[m] < t.g[best] || (t.g[m] == t.g[best] && m < best))) best = m;
    goal.solved = best >= 0;
    if (!goal.solved) continue;
    Trajectory traj;
    traj.vertices = t.path_to(best);
    for (int v : traj.vertices) traj.waypoints.push_back(t.points[v]);
    traj.cost = t.g[best];
    traj.goal = gi;
    traj.frontier_id = goal.frontier_id;
    traj.kind = goal.kind;
    res.trajectories.push_back(std::move(traj));
  }
  return res;
}

std::optional<std::string> check_tree(const SearchTree& t, const CostModel& cost, double tol) {
  const int n = t.size();
  if (!t.in_tree[0] || t.parent[0] != -1 || t.g[0] != 0.0) return "root must have no parent and zero cost";
  for (int v = 1; v < n; ++v) {
    if (!t.in_tree[v]) {
      if (t.parent[v] != -1 || t.g[v] != kInf) return "vertex " + std::to_string(v) + " outside tree has state";
      continue;
    }
    const int p = t.parent[v];
    if (p < 0 || !t.in_tree[p]) return "vertex " + std::to_string(v) + " has no valid parent";
    if (std::count(t.children[p].begin(), t.children[p].end(), v) != 1)
      return "vertex " + std::to_string(v) + " missing from its parent's child list";
    const double c = cost.cost(t.points[p], t.points[v]);
    if (!(c < kInf)) return "edge into vertex " + std::to_string(v) + " is not collision free";
    if (std::abs(t.g[v] - (t.g[p] + c)) > tol * std::max(1.0, t.g[v]))
      return "cost-to-come mismatch at vertex " + std::to_string(v);
    int steps = 0;
    for (int u = v; u > 0; u = t.parent[u])
      if (++steps > n) return "cycle through vertex " + std::to_string(v);
  }
  int edges = 0;
  for (int v = 0; v < n; ++v) edges += static_cast<int>(t.children[v].size());
  if (edges != t.vertex_count() - 1) return "edge count does not match vertex count";
  return std::nullopt;
}

const Trajectory& select_nbt(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw NoTrajectoryError("no candidate trajectory");
  const Trajectory* best = &trajectories[0];
  for (const auto& t : trajectories.subspan(1)) {
    const double tol = 1e-9 * std::max(1.0, std::abs(best->cost));
    if (t.cost < best->cost - tol) {
      best = &t;
    } else if (std::abs(t.cost - best->cost) <= tol) {
      const double lt = t.length(), lb = best->length();
      if (lt < lb - 1e-12 || (std::abs(lt - lb) <= 1e-12 && t.goal < best->goal)) best = &t;
    }
  }
  return *best;
}

}  // namespace gdm
