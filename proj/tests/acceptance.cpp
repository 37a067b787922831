// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Usage: gdm_acceptance [--strict] [--report FILE] [scenario_dir]
//
// Exits 0 once every criterion has been evaluated, whatever the verdicts, and
// 1 if the run aborts. With --strict any FAIL also exits 1.

#include "frontier_oracle.hpp"
#include "gmrf_oracle.hpp"

#include "gdm/campaign.hpp"
#include "gdm/convergence.hpp"
#include "gdm/eval.hpp"
#include "gdm/io.hpp"
#include "gdm/mission.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gdm;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr int kWgfdMaps = 120;
constexpr double kWgfdSeconds = 10.0;
constexpr int kGmrfInstances = 50;
constexpr double kMeanRelTol = 1e-6;
constexpr double kVarRelTol = 0.05;
constexpr int kMonotoneCases = 100;
constexpr double kGmrfSeconds = 30.0;
constexpr double kOracleGap = 0.10;
constexpr double kMonotoneSlack = 0.02;
constexpr double kConvergenceSeconds = 300.0;
constexpr double kMinSuccess = 0.95;
constexpr double kMazeSeconds = 180.0;
constexpr int kTrials = 10;
constexpr int kMinPairedWins = 8;
constexpr double kCampaignSeconds = 1200.0;
constexpr double kMinCompleteness = 0.95;
constexpr double kCoverageTimeGap = 0.25;
constexpr double kPlanSeconds = 2.0;

int failures = 0;
std::FILE* report_file = nullptr;

void emit(const std::string& line) {
  std::printf("%s\n", line.c_str());
  std::fflush(stdout);
  if (report_file) {
    std::fprintf(report_file, "%s\n", line.c_str());
    std::fflush(report_file);
  }
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  emit(std::string(ok ? "[PASS]" : "[FAIL]") + " criterion " + std::to_string(id) + ": " + name + ": " + detail);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

OccupancyGrid open_grid(int w, int h) {
  OccupancyGrid g(Lattice(Point::Zero(), 0.1, w, h));
  for (int i = 0; i < g.lattice().size(); ++i) g.set_prob(i, 0.0);
  return g;
}

// 1. Gas frontier detection against the exhaustive definition.
void wgfd_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(4, 40), size_draw(1, 4);
  std::uniform_real_distribution<double> frac(0.2, 0.8);
  int equal = 0, nonempty = 0;
  for (int k = 0; k < kWgfdMaps; ++k) {
    const Lattice lat(Point::Zero(), 0.1, dim(rng), dim(rng));
    std::bernoulli_distribution observed_draw(frac(rng)), critical_draw(frac(rng));
    std::vector<double> mean(lat.size());
    std::vector<char> observed(lat.size());
    for (int c = 0; c < lat.size(); ++c) {
      observed[c] = observed_draw(rng);
      mean[c] = critical_draw(rng) ? 8.0 : 1.0;
    }
    const int robot = std::uniform_int_distribution<int>(0, lat.size() - 1)(rng);
    observed[robot] = 1;
    mean[robot] = 8.0;
    const GasPosterior p = test::labelled_posterior(lat, mean, observed);
    const GasKnowledgePartition part = partition_knowledge(p, 0.9);
    const GasThreshold thr{2.0, 0.0, 10.0, 2.0};
    const int m = size_draw(rng);
    const auto got =
        test::as_sets(detect_gas_frontiers(p, open_grid(lat.width, lat.height), part, lat.center(robot), thr, m));
    equal += got == test::gas_frontier_oracle(p, part, robot, thr.tau_gas, m);
    nonempty += !got.empty();
  }
  const double secs = seconds_since(t0);
  report(1, "gas frontier oracle equivalence", equal == kWgfdMaps && secs < kWgfdSeconds,
         fmt("%d/%d maps equal (%d with frontiers), %.2f s", equal, kWgfdMaps, nonempty, secs));
}

// 2. Iterative posterior against a dense Cholesky reference.
void gmrf_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> dim(5, 30), nobs(1, 60);
  std::uniform_real_distribution<double> conc(0.0, 80.0), wall_frac(0.0, 0.3);
  auto random_map = [&](int w, int h) {
    OccupancyGrid g = open_grid(w, h);
    std::bernoulli_distribution wall(wall_frac(rng));
    for (int i = 0; i < g.lattice().size(); ++i)
      if (wall(rng)) g.set_prob(i, 1.0);
    return g;
  };
  auto random_obs = [&](const OccupancyGrid& g) {
    const KnownFreeSet free = known_free(g);
    const int c = free.cells[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    return GasObservation{g.lattice().center(c), conc(rng), 0.0};
  };

  double worst_mean = 0.0, worst_var = 0.0;
  for (int k = 0; k < kGmrfInstances; ++k) {
    const OccupancyGrid g = random_map(dim(rng), dim(rng));
    if (known_free(g).empty()) continue;
    GasMap m(g.lattice());
    m.rebuild_structure(g);
    const int n = nobs(rng);
    for (int j = 0; j < n; ++j) m.add_observation(random_obs(g));
    const GasPosterior it = m.solve_iterative();
    const auto ref = test::dense_oracle(g, m.hyper(), m.observations());
    for (std::size_t s = 0; s < it.size(); ++s) {
      worst_mean = std::max(worst_mean, std::abs(it.mean[s] - ref.mean[s]) / std::max(std::abs(ref.mean[s]), 1e-9));
      worst_var = std::max(worst_var, std::abs(it.variance[s] - ref.variance[s]) / ref.variance[s]);
    }
  }

  int monotone = 0;
  for (int k = 0; k < kMonotoneCases; ++k) {
    const OccupancyGrid g = random_map(dim(rng) / 2 + 3, dim(rng) / 2 + 3);
    if (known_free(g).empty()) {
      ++monotone;
      continue;
    }
    GasMap m(g.lattice());
    m.rebuild_structure(g);
    for (int j = 0; j < 5; ++j) m.add_observation(random_obs(g));
    const GasPosterior before = m.solve_iterative();
    m.add_observation(random_obs(g));
    const GasPosterior after = m.solve_iterative();
    bool ok = true;
    for (std::size_t s = 0; s < before.size(); ++s) ok &= after.variance[s] <= before.variance[s] * (1.0 + 1e-9);
    monotone += ok;
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_mean <= kMeanRelTol && worst_var <= kVarRelTol && monotone == kMonotoneCases &&
                  secs < kGmrfSeconds;
  report(2, "GMRF correctness", ok,
         fmt("max rel mean err %.2e, max rel variance err %.2e, monotone %d/%d, %.2f s", worst_mean, worst_var,
             monotone, kMonotoneCases, secs));
}

std::vector<std::uint64_t> seed_range(int n) {
  std::vector<std::uint64_t> s;
  for (int i = 1; i <= n; ++i) s.push_back(static_cast<std::uint64_t>(i));
  return s;
}

// 3. Median cost against the radius-graph oracle as N grows.
void planner_convergence(const std::string& dir) {
  const auto t0 = Clock::now();
  const int ns[] = {50, 100, 200, 400, 800};
  const auto seeds = seed_range(10);
  bool ok = true;
  std::string detail;
  for (const char* name : {"convergence_corridor", "convergence_pillars", "convergence_rooms"}) {
    const Scenario s = load_scenario(dir + "/" + name + ".json");
    const ConvergenceCase c = make_convergence_case(s);
    for (double alpha : {0.0, 1.0}) {
      const auto rows = convergence_study(c, s.planner, alpha, ns, seeds);
      std::map<int, std::vector<double>> by_n;
      for (const auto& r : rows) by_n[r.n].push_back(r.cost);
      std::vector<double> med;
      for (int n : ns) med.push_back(median(by_n[n]));
      const double ref = oracle_cost(c, s.planner, alpha, 800);
      const double gap = med.back() / ref - 1.0;
      int rises = 0;
      for (std::size_t i = 1; i < med.size(); ++i) rises += med[i] > med[i - 1] * (1.0 + kMonotoneSlack);
      ok &= std::isfinite(med.back()) && gap <= kOracleGap && rises == 0;
      detail += fmt("%s a=%g gap %.1f%% rises %d; ", name + 12, alpha, 100.0 * gap, rises);
    }
  }
  const double secs = seconds_since(t0);
  report(3, "planner convergence to the oracle", ok && secs < kConvergenceSeconds, detail + fmt("%.1f s", secs));
}

// 4. Success rate through a maze with 3-cell corridors.
void maze_completeness(const std::string& dir) {
  const auto t0 = Clock::now();
  const Scenario s = load_scenario(dir + "/maze.json");
  const ConvergenceCase c = make_convergence_case(s);

  // Corridor width after inflation, counted down the column through the middle.
  const Lattice& lat = c.grid.lattice();
  std::vector<int> runs;
  int run = 0;
  for (int iy = 0; iy < lat.height; ++iy) {
    if (c.free.contains(lat.index({lat.width / 2, iy}))) {
      ++run;
    } else if (run) {
      runs.push_back(run);
      run = 0;
    }
  }
  const bool three_wide = !runs.empty() && std::all_of(runs.begin(), runs.end(), [](int r) { return r == 3; });

  const int ns[] = {50, 100, 200, 400, 800};
  const auto seeds = seed_range(100);
  const auto rows = convergence_study(c, s.planner, s.planner.alpha, ns, seeds);
  std::vector<double> rate;
  std::string detail = fmt("corridors %zu x 3 cells: %s; success", runs.size(), three_wide ? "yes" : "no");
  for (int n : ns) {
    int hits = 0;
    for (const auto& r : rows) hits += r.n == n && std::isfinite(r.cost);
    rate.push_back(hits / static_cast<double>(seeds.size()));
    detail += fmt(" N%d=%.2f", n, rate.back());
  }
  const bool nondecreasing = std::is_sorted(rate.begin(), rate.end());
  const double secs = seconds_since(t0);
  report(4, "probabilistic completeness in a maze",
         three_wide && rate.back() >= kMinSuccess && nondecreasing && secs < kMazeSeconds,
         detail + fmt(", %.1f s", secs));
}

const TrialResult* find_trial(const CampaignResult& r, const std::string& id, std::uint64_t seed) {
  for (const auto& t : r.trials)
    if (t.config_id == id && t.seed == seed) return &t;
  return nullptr;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / v.size();
}

// 5 and 6. Desk-scale campaign.
CampaignResult mission_campaign(const Scenario& s) {
  const auto t0 = Clock::now();
  const std::vector<MissionConfig> configs{*make_mission_config("gff", s.planner),
                                           *make_mission_config("fgf", s.planner),
                                           *make_mission_config("baseline", s.planner)};
  const std::string gff = configs[0].id, fgf = configs[1].id, base = configs[2].id;
  CampaignResult r = monte_carlo(s, configs, kTrials, 1, 1);
  const double secs = seconds_since(t0);

  std::map<std::string, const ConfigSummary*> sum;
  for (const auto& c : r.summary.configs) sum[c.id] = &c;
  int rmse_wins = 0, entropy_wins = 0;
  for (int k = 1; k <= kTrials; ++k) {
    const TrialResult* a = find_trial(r, gff, k);
    const TrialResult* b = find_trial(r, base, k);
    if (!a || !b || a->failed || b->failed) continue;
    rmse_wins += a->final_rmse && b->final_rmse && *a->final_rmse < *b->final_rmse;
    entropy_wins += a->final_entropy < b->final_entropy;
  }
  const double rg = sum[gff]->rmse_mean, rf = sum[fgf]->rmse_mean, rb = sum[base]->rmse_mean;
  const double hg = sum[gff]->entropy_mean, hb = sum[base]->entropy_mean;
  const bool ok = !r.summary.incomplete && rg < rb && hg < hb && rg <= rf && rf <= rb &&
                  rmse_wins >= kMinPairedWins && entropy_wins >= kMinPairedWins && secs < kCampaignSeconds;
  report(5, "mission comparison against the RRT* baseline", ok,
         fmt("RMSE GFF %.2f FGF %.2f base %.2f; entropy GFF %.1f base %.1f; paired wins RMSE %d/%d entropy %d/%d; "
             "%.0f s",
             rg, rf, rb, hg, hb, rmse_wins, kTrials, entropy_wins, kTrials, secs));

  double min_completeness = 1.0;
  std::map<std::string, std::vector<double>> t90;
  bool all_covered = true;
  for (const auto& t : r.trials) {
    min_completeness = std::min(min_completeness, t.final_completeness);
    if (t.time_to_coverage)
      t90[t.config_id].push_back(*t.time_to_coverage);
    else
      all_covered = false;
  }
  double lo = 1e300, hi = 0.0;
  std::string detail = fmt("min final completeness %.3f; mean t90", min_completeness);
  for (const auto& c : configs) {
    const double m = mean_of(t90[c.id]);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    detail += fmt(" %s %.1f s", c.id.c_str(), m);
  }
  const double gap = hi / lo - 1.0;
  report(6, "completeness parity", min_completeness >= kMinCompleteness && all_covered && gap <= kCoverageTimeGap,
         detail + fmt("; max pairwise gap %.0f%%", 100.0 * gap));
  return r;
}

// 7. Wall-clock time of single plans at the default configuration.
void plan_throughput(const Scenario& s) {
  MissionConfig cfg = *make_mission_config("gff", s.planner);
  cfg.timing = true;
  Mission m(s, cfg, 1);
  double worst = 0.0, total = 0.0;
  int plans = 0;
  while (!m.finished() && plans < 25) {
    const StepRecord r = m.step();
    if (r.goal_kind == "none") continue;
    worst = std::max(worst, r.plan_time_ms);
    total += r.plan_time_ms;
    ++plans;
  }
  report(7, "planning throughput", plans > 0 && worst < 1000.0 * kPlanSeconds,
         fmt("N=%d, max goals %d: %d plans, mean %.0f ms, max %.0f ms", s.planner.n_samples, s.planner.max_goals,
             plans, plans ? total / plans : 0.0, worst));
}

std::string serialized(const TrialResult& t) {
  std::ostringstream os;
  write_step_log(os, t);
  return os.str();
}

// 8. Determinism and metric invariants.
void determinism(const Scenario& desk, const CampaignResult& campaign) {
  std::string detail;
  bool ok = true;

  Scenario shortened = desk;
  shortened.budget = 30.0;
  for (const char* name : {"gff", "baseline"}) {
    const MissionConfig cfg = *make_mission_config(name, desk.planner);
    const auto a = run_mission(shortened, cfg, 4), b = run_mission(shortened, cfg, 4);
    const bool same = serialized(make_trial_result(cfg.id, 4, a.log, a.early_terminated)) ==
                      serialized(make_trial_result(cfg.id, 4, b.log, b.early_terminated));
    ok &= same;
    detail += fmt("%s rerun %s; ", cfg.id.c_str(), same ? "identical" : "DIFFERS");
  }
  const MissionConfig gff = *make_mission_config("gff", desk.planner);
  const TrialResult* first = find_trial(campaign, gff.id, 1);
  const auto again = run_mission(desk, gff, 1);
  const bool campaign_same =
      first && serialized(*first) == serialized(make_trial_result(first->config_id, 1, again.log, again.early_terminated));
  ok &= campaign_same;
  detail += fmt("campaign trial rerun %s; ", campaign_same ? "identical" : "DIFFERS");

  int violations = 0;
  std::size_t steps = 0;
  for (const auto& t : campaign.trials) {
    steps += t.log.size();
    if (const auto bad = check_log_invariants(t.log, desk.budget)) {
      ++violations;
      detail += fmt("%s seed %llu: %s; ", t.config_id.c_str(), static_cast<unsigned long long>(t.seed), bad->c_str());
    }
  }
  ok &= violations == 0;
  detail += fmt("log invariants on %zu steps: %d violations; ", steps, violations);

  // Entropy on the critical set never rises as the observations of a finished
  // mission are replayed onto its final map structure.
  const MissionState& fin = again.final_state;
  GasMap replay(fin.occ.lattice(), desk.gmrf);
  replay.rebuild_structure(fin.occ);
  replay.set_time(fin.t);
  const CriticalSet crit = critical_set(GroundTruthField(desk), desk.lattice(), truth_free_mask(desk), desk.z_thresh);
  double prev = entropy(replay.solve_iterative(), crit);
  int rises = 0;
  for (const auto& o : fin.gas.observations()) {
    replay.add_observation(o);
    const double h = entropy(replay.solve_iterative(), crit);
    rises += h > prev + 1e-9 * std::abs(prev);
    prev = h;
  }
  ok &= rises == 0;
  detail += fmt("entropy replay over %zu observations: %d rises", fin.gas.observations().size(), rises);
  report(8, "determinism and invariants", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = GDM_SCENARIO_DIR;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--strict") {
      strict = true;
    } else if (a == "--report" && i + 1 < argc) {
      report_file = std::fopen(argv[++i], "w");
      if (!report_file) {
        std::fprintf(stderr, "cannot write %s\n", argv[i]);
        return 1;
      }
    } else {
      dir = a;
    }
  }
  try {
    wgfd_equivalence();
    gmrf_correctness();
    planner_convergence(dir);
    maze_completeness(dir);
    const Scenario desk = load_scenario(dir + "/desk.json");
    const CampaignResult campaign = mission_campaign(desk);
    plan_throughput(desk);
    determinism(desk, campaign);
  } catch (const std::exception& e) {
    emit(std::string("[FAIL] acceptance aborted: ") + e.what());
    return 1;
  }
  emit(std::to_string(8 - failures) + "/8 criteria passed");
  if (report_file) std::fclose(report_file);
  return strict && failures ? 1 : 0;
}
