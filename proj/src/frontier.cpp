#include "gdm/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace gdm {

std::string_view to_string(FrontierKind kind) { return kind == FrontierKind::Gas ? "gas" : "occupancy"; }

std::string_view to_string(GoalPolicy policy) {
  switch (policy) {
    case GoalPolicy::F: return "F";
    case GoalPolicy::FGF: return "FGF";
    case GoalPolicy::GFF: return "GFF";
  }
  return "?";
}

std::optional<GoalPolicy> parse_goal_policy(std::string_view name) {
  if (name == "F") return GoalPolicy::F;
  if (name == "FGF") return GoalPolicy::FGF;
  if (name == "GFF") return GoalPolicy::GFF;
  return std::nullopt;
}

Point frontier_centroid(const OccupancyGrid& occ, std::span<const int> cells) {
  Point mean = Point::Zero();
  for (int c : cells) mean += occ.lattice().center(c);
  if (!cells.empty()) mean /= static_cast<double>(cells.size());
  return snap_to_free(occ, mean).value_or(mean);
}

namespace {

// 8-connected components of the cells flagged in `mask`, each sorted, in
// order of their lowest cell index.
std::vector<std::vector<int>> components8(const Lattice& lat, const std::vector<char>& mask) {
  std::vector<char> seen(mask.size(), 0);
  std::vector<std::vector<int>> out;
  std::deque<int> q;
  for (int i = 0; i < lat.size(); ++i) {
    if (!mask[i] || seen[i]) continue;
    std::vector<int> comp;
    seen[i] = 1;
    q.push_back(i);
    while (!q.empty()) {
      const int c = q.front();
      q.pop_front();
      comp.push_back(c);
      for_each_neighbor8(lat, c, [&](int n) {
        if (mask[n] && !seen[n]) {
          seen[n] = 1;
          q.push_back(n);
        }
      });
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

std::vector<Frontier> detect_occ_frontiers(const OccupancyGrid& occ, int min_frontier_size,
                                           std::optional<Point> robot) {
  const Lattice& lat = occ.lattice();
  std::vector<char> boundary(lat.size(), 0);
  for (int i = 0; i < lat.size(); ++i) {
    if (!occ.is_free(i)) continue;
    bool touches_unknown = false;
    for_each_neighbor8(lat, i, [&](int n) { touches_unknown = touches_unknown || occ.is_unknown(n); });
    boundary[i] = touches_unknown;
  }

  std::vector<char> reachable;
  if (robot) {
    const int start = index_of(lat, *robot);
    if (start >= 0 && occ.is_free(start)) {
      std::vector<char> free_mask(lat.size(), 0);
      for (int i = 0; i < lat.size(); ++i) free_mask[i] = occ.is_free(i);
      reachable.assign(lat.size(), 0);
      std::deque<int> q{start};
      reachable[start] = 1;
      while (!q.empty()) {
        const int c = q.front();
        q.pop_front();
        for_each_neighbor8(lat, c, [&](int n) {
          if (free_mask[n] && !reachable[n]) {
            reachable[n] = 1;
            q.push_back(n);
          }
        });
      }
    }
  }

  std::vector<Frontier> out;
  for (auto& comp : components8(lat, boundary)) {
    if (static_cast<int>(comp.size()) < min_frontier_size) continue;
    if (!reachable.empty() && std::none_of(comp.begin(), comp.end(), [&](int c) { return reachable[c] != 0; }))
      continue;
    Frontier f;
    f.kind = FrontierKind::Occupancy;
    f.centroid = frontier_centroid(occ, comp);
    f.cells = std::move(comp);
    f.id = static_cast<int>(out.size());
    out.push_back(std::move(f));
  }
  return out;
}

GasThreshold dynamic_threshold(const GasPosterior& post, const GasKnowledgePartition& part, double percentile,
                               double tau_gas_min) {
  if (!(percentile > 0.0 && percentile <= 100.0)) throw PreconditionError("percentile must lie in (0, 100]");
  if (!(tau_gas_min > 0.0)) throw PreconditionError("tau_gas_min must be positive");
  GasThreshold thr;
  thr.percentile = percentile;
  thr.tau_gas_min = tau_gas_min;
  std::vector<double> means;
  means.reserve(part.observed.size());
  for (int c : part.observed) means.push_back(post.mean_at(c));
  if (!means.empty()) {
    std::sort(means.begin(), means.end());
    const auto n = means.size();
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n) - 1e-12));
    rank = std::clamp<std::size_t>(rank, 1, n);
    thr.q_p = means[rank - 1];
  }
  thr.tau_gas = std::max(thr.q_p, tau_gas_min);
  return thr;
}

std::vector<char> critical_mask(const GasPosterior& post, const GasKnowledgePartition& part,
                                const GasThreshold& thr) {
  std::vector<char> crit(post.lattice.size(), 0);
  for (int c : part.observed) crit[c] = post.mean_at(c) >= thr.tau_gas;
  return crit;
}

bool is_new_gas_frontier_cell(const Lattice& lattice, int cell, const GasKnowledgePartition& part,
                              const std::vector<char>& critical, const std::vector<char>& flagged) {
  if (!part.is_unknown[cell]) return false;
  if (flagged[cell]) return false;
  bool has_critical = false;
  for_each_neighbor8(lattice, cell, [&](int n) { has_critical = has_critical || critical[n]; });
  return has_critical;
}

std::vector<Frontier> detect_gas_frontiers(const GasPosterior& post, const OccupancyGrid& occ,
                                           const GasKnowledgePartition& part, const Point& robot,
                                           const GasThreshold& thr, int min_frontier_size) {
  const Lattice& lat = post.lattice;
  std::vector<Frontier> out;
  const int cr = index_of(lat, robot);
  if (cr < 0 || !post.contains(cr)) throw PreconditionError("robot is not in known-free space");
  if (post.mean_at(cr) < thr.tau_gas) return out;

  const std::vector<char> crit = critical_mask(post, part, thr);
  std::vector<char> flagged(lat.size(), 0);
  std::vector<char> visited(lat.size(), 0);
  visited[cr] = 1;
  std::deque<int> q{cr};
  while (!q.empty()) {
    const int c = q.front();
    q.pop_front();
    for_each_neighbor8(lat, c, [&](int cn) {
      if (is_new_gas_frontier_cell(lat, cn, part, crit, flagged)) {
        flagged[cn] = 1;
        std::vector<int> cells{cn};
        std::deque<int> qf{cn};
        while (!qf.empty()) {
          const int cp = qf.front();
          qf.pop_front();
          for_each_neighbor8(lat, cp, [&](int cpn) {
            if (is_new_gas_frontier_cell(lat, cpn, part, crit, flagged)) {
              flagged[cpn] = 1;
              cells.push_back(cpn);
              qf.push_back(cpn);
            }
          });
        }
        if (static_cast<int>(cells.size()) >= min_frontier_size) {
          std::sort(cells.begin(), cells.end());
          Frontier f;
          f.kind = FrontierKind::Gas;
          f.centroid = frontier_centroid(occ, cells);
          f.cells = std::move(cells);
          f.id = static_cast<int>(out.size());
          out.push_back(std::move(f));
        }
      } else if (crit[cn] && !visited[cn]) {
        visited[cn] = 1;
        q.push_back(cn);
      }
    });
  }
  return out;
}

void GasFrontierStore::revalidate(const GasKnowledgePartition& part, const std::vector<char>& critical,
                                  const OccupancyGrid& occ, int min_frontier_size) {
  const Lattice& lat = occ.lattice();
  const std::vector<char> none(lat.size(), 0);
  std::vector<Frontier> next;
  for (auto& f : live_) {
    std::vector<char> keep(lat.size(), 0);
    int kept = 0;
    for (int c : f.cells)
      if (c < static_cast<int>(part.is_unknown.size()) && is_new_gas_frontier_cell(lat, c, part, critical, none)) {
        keep[c] = 1;
        ++kept;
      }
    if (kept == f.size()) {
      next.push_back(std::move(f));
      continue;
    }
    bool first = true;
    for (auto& comp : components8(lat, keep)) {
      if (static_cast<int>(comp.size()) < min_frontier_size) continue;
      Frontier piece = f;
      piece.id = first ? f.id : next_id_++;
      piece.centroid = frontier_centroid(occ, comp);
      piece.cells = std::move(comp);
      next.push_back(std::move(piece));
      first = false;
    }
    if (first) resolved_.push_back(std::move(f));
  }
  live_ = std::move(next);
}

void GasFrontierStore::merge(std::span<const Frontier> detected, const OccupancyGrid& occ, int step) {
  for (const auto& d : detected) {
    std::vector<std::size_t> overlapping;
    for (std::size_t i = 0; i < live_.size(); ++i) {
      const auto& cells = live_[i].cells;
      const bool shares = std::any_of(d.cells.begin(), d.cells.end(),
                                      [&](int c) { return std::binary_search(cells.begin(), cells.end(), c); });
      if (shares) overlapping.push_back(i);
    }
    if (overlapping.empty()) {
      Frontier f = d;
      f.kind = FrontierKind::Gas;
      f.id = next_id_++;
      f.created_step = step;
      live_.push_back(std::move(f));
      continue;
    }
    Frontier& host = live_[overlapping.front()];
    std::vector<int> cells = d.cells;
    for (std::size_t i : overlapping) cells.insert(cells.end(), live_[i].cells.begin(), live_[i].cells.end());
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (std::size_t k = 1; k < overlapping.size(); ++k) host.created_step = std::min(host.created_step, live_[overlapping[k]].created_step);
    host.centroid = frontier_centroid(occ, cells);
    host.cells = std::move(cells);
    for (std::size_t k = overlapping.size(); k-- > 1;) live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(overlapping[k]));
  }
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

std::vector<Frontier> select_goals(GoalPolicy policy, std::span<const Frontier> occ_frontiers,
                                   std::span<const Frontier> gas_frontiers, int max_goals, std::mt19937_64& rng) {
  if (max_goals < 1) throw PreconditionError("max_goals must be at least 1");
  std::vector<Frontier> out;
  auto take = [&](std::span<const Frontier> pool) {
    const std::size_t room = static_cast<std::size_t>(max_goals) - out.size();
    for (std::size_t i : sample_without_replacement(pool.size(), room, rng)) out.push_back(pool[i]);
  };
  switch (policy) {
    case GoalPolicy::F:
      take(occ_frontiers);
      break;
    case GoalPolicy::FGF:
      take(occ_frontiers);
      take(gas_frontiers);
      break;
    case GoalPolicy::GFF:
      take(gas_frontiers);
      take(occ_frontiers);
      break;
  }
  return out;
}

}  // namespace gdm
