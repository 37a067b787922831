// gdm: command-line driver for scenario validation, missions, campaigns,
// convergence studies and snapshot export.

#include "gdm/campaign.hpp"
#include "gdm/convergence.hpp"
#include "gdm/io.hpp"
#include "gdm/mission.hpp"
#include "gdm/scenario.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gdm;

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kRuntime = 3, kInvariant = 4 };

struct PlannerFlags {
  std::optional<int> n, max_goals, k_n;
  std::optional<double> epsilon_mix, alpha, beta, gamma_scale;
  std::optional<std::string> heuristic, cost;
};

void add_planner_flags(CLI::App* cmd, PlannerFlags& f) {
  cmd->add_option("--N", f.n, "Samples per batch")->check(CLI::Range(2, 100000));
  cmd->add_option("--max-goals", f.max_goals, "Goal frontiers per plan")->check(CLI::Range(1, 1000));
  cmd->add_option("--k-n", f.k_n, "Samples per goal region")->check(CLI::Range(1, 1000));
  cmd->add_option("--epsilon-mix", f.epsilon_mix, "Uniform share of the sampling mixture")
      ->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--alpha", f.alpha, "Distance weight in the edge cost")->check(CLI::NonNegativeNumber);
  cmd->add_option("--beta", f.beta, "Variance weight in the UCB field")->check(CLI::NonNegativeNumber);
  cmd->add_option("--gamma-scale", f.gamma_scale, "Factor on the RGG constant")->check(CLI::PositiveNumber);
  cmd->add_option("--heuristic", f.heuristic, "distance_only or ucb_aware");
  cmd->add_option("--cost", f.cost, "ucb or euclidean");
}

// Command-line values take precedence over the scenario's planner block.
PlannerConfig resolve_planner(PlannerConfig p, const PlannerFlags& f) {
  if (f.n) p.n_samples = *f.n;
  if (f.max_goals) p.max_goals = *f.max_goals;
  if (f.k_n) p.k_n = *f.k_n;
  if (f.epsilon_mix) p.epsilon_mix = *f.epsilon_mix;
  if (f.alpha) p.alpha = *f.alpha;
  if (f.beta) p.beta = *f.beta;
  if (f.gamma_scale) p.gamma_scale = *f.gamma_scale;
  if (f.heuristic) {
    const auto m = parse_heuristic_mode(*f.heuristic);
    if (!m) throw PreconditionError("unknown heuristic '" + *f.heuristic + "'");
    p.heuristic = *m;
  }
  if (f.cost) {
    const auto c = parse_cost_kind(*f.cost);
    if (!c) throw PreconditionError("unknown cost '" + *f.cost + "'");
    p.cost = *c;
  }
  p.validate();
  return p;
}

fs::path output_path(const std::string& p) {
  fs::path out(p);
  if (out.is_relative())
    if (const char* root = std::getenv("GDM_OUTPUT_ROOT"); root && *root) out = fs::path(root) / out;
  return out;
}

std::string slug(const std::string& id) {
  std::string s;
  for (char c : id) s += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_';
  return s;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw PreconditionError("cannot write " + p.string());
  return os;
}

MissionConfig mission_config(const std::string& policy, const PlannerConfig& planner, bool timing) {
  auto cfg = make_mission_config(policy, planner);
  if (!cfg) throw PreconditionError("unknown policy '" + policy + "' (expected F, FGF, GFF or baseline)");
  cfg->timing = timing;
  return *cfg;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_trial(const fs::path& dir, const TrialResult& t, bool timing) {
  auto os = open_out(dir / (slug(t.config_id) + "_seed" + std::to_string(t.seed) + ".jsonl"));
  write_step_log(os, t, timing);
}

int cmd_validate(const std::string& path) {
  const Scenario s = load_scenario(path);
  std::cout << path << ": OK (" << s.lattice().width << "x" << s.lattice().height << " cells, "
            << s.obstacles.size() << " obstacles, " << s.sources.size() << " sources)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active gas distribution mapping: missions, campaigns and planner studies"};
  app.require_subcommand(1);

  std::string scenario_path, policy = "GFF", out = "out", policies = "GFF,FGF,baseline", ns = "50,100,200,400,800";
  std::uint64_t seed = 1, base_seed = 1;
  int trials = 10, workers = 1, seeds = 10, step = 1;
  bool timing = false;
  std::optional<double> budget;
  PlannerFlags pf;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", scenario_path, "Scenario JSON")->required();

  auto* run = app.add_subcommand("run", "Run one mission and write its step log");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--policy", policy, "F, FGF, GFF or baseline");
  run->add_option("--seed", seed, "Mission seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--budget", budget, "Override the time budget (s)")->check(CLI::NonNegativeNumber);
  run->add_flag("--timing", timing, "Record wall-clock planning time in the log");
  add_planner_flags(run, pf);

  auto* campaign = app.add_subcommand("campaign", "Seeded Monte Carlo comparison of policies");
  campaign->add_option("scenario", scenario_path, "Scenario JSON")->required();
  campaign->add_option("--policies", policies, "Comma-separated policies");
  campaign->add_option("--trials", trials, "Trials per policy")->check(CLI::PositiveNumber);
  campaign->add_option("--base-seed", base_seed, "First seed");
  campaign->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  campaign->add_option("--out", out, "Output directory");
  campaign->add_option("--budget", budget, "Override the time budget (s)")->check(CLI::NonNegativeNumber);
  campaign->add_flag("--timing", timing, "Record wall-clock planning time in the logs");
  add_planner_flags(campaign, pf);

  auto* convergence = app.add_subcommand("convergence", "Single-plan cost against sample count");
  convergence->add_option("scenario", scenario_path, "Scenario JSON with a convergence goal")->required();
  convergence->add_option("--n", ns, "Comma-separated sample counts");
  convergence->add_option("--seeds", seeds, "Seeds 1..S per sample count")->check(CLI::PositiveNumber);
  convergence->add_option("--out", out, "Output CSV path");
  add_planner_flags(convergence, pf);

  auto* snapshot = app.add_subcommand("export-snapshot", "Run a mission to a step and dump its state");
  snapshot->add_option("scenario", scenario_path, "Scenario JSON")->required();
  snapshot->add_option("--policy", policy, "F, FGF, GFF or baseline");
  snapshot->add_option("--seed", seed, "Mission seed");
  snapshot->add_option("--step", step, "Planning steps to run before the dump")->check(CLI::NonNegativeNumber);
  snapshot->add_option("--out", out, "Output directory");
  add_planner_flags(snapshot, pf);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);

    Scenario s = load_scenario(scenario_path);
    if (budget) s.budget = *budget;
    const PlannerConfig planner = resolve_planner(s.planner, pf);

    if (run->parsed()) {
      const MissionConfig cfg = mission_config(policy, planner, timing);
      MissionResult m = run_mission(s, cfg, seed);
      const TrialResult t = make_trial_result(cfg.id, seed, std::move(m.log), m.early_terminated);
      write_trial(output_path(out), t, timing);
      if (const auto bad = check_log_invariants(t.log, s.budget)) {
        std::cerr << "invariant violated: " << *bad << '\n';
        return kInvariant;
      }
      std::cout << cfg.id << " seed " << seed << ": " << t.log.size() << " steps";
      if (t.final_rmse) std::cout << ", RMSE " << *t.final_rmse;
      std::cout << ", entropy " << t.final_entropy << ", completeness " << t.final_completeness
                << (t.early_terminated ? " (early termination)" : "") << '\n';
      return kOk;
    }

    if (campaign->parsed()) {
      std::vector<MissionConfig> configs;
      for (const auto& p : split(policies)) configs.push_back(mission_config(p, planner, timing));
      const fs::path dir = output_path(out);
      int violations = 0;
      // Trials arrive on this thread, so file writes are serialized.
      auto on_trial = [&](const TrialResult& t) {
        write_trial(dir, t, timing);
        if (t.failed) std::cerr << "warning: " << t.config_id << " seed " << t.seed << " failed: " << t.error << '\n';
        if (const auto bad = check_log_invariants(t.log, s.budget)) {
          std::cerr << "invariant violated in " << t.config_id << " seed " << t.seed << ": " << *bad << '\n';
          ++violations;
        }
      };
      const CampaignResult r = monte_carlo(s, configs, trials, base_seed, workers, "", on_trial);
      auto csv = open_out(dir / "campaign.csv");
      write_campaign_csv(csv, r.summary);
      write_campaign_csv(std::cout, r.summary);
      if (r.summary.incomplete) std::cerr << "warning: summary excludes failed trials\n";
      return violations ? kInvariant : kOk;
    }

    if (convergence->parsed()) {
      std::vector<int> n_list;
      for (const auto& v : split(ns)) n_list.push_back(std::stoi(v));
      std::vector<std::uint64_t> seed_list;
      for (int i = 1; i <= seeds; ++i) seed_list.push_back(static_cast<std::uint64_t>(i));
      const ConvergenceCase c = make_convergence_case(s);
      const auto rows = convergence_study(c, planner, planner.alpha, n_list, seed_list);
      const int n_ref = *std::max_element(n_list.begin(), n_list.end());
      auto os = open_out(output_path(out));
      os << "# schema: gdm.convergence/1\nkind,n,seed,cost\n";
      os.precision(17);
      for (const auto& r : rows) os << "plan," << r.n << ',' << r.seed << ',' << r.cost << '\n';
      os << "oracle," << n_ref << ",," << oracle_cost(c, planner, planner.alpha, n_ref) << '\n';
      return kOk;
    }

    if (snapshot->parsed()) {
      Mission m(s, mission_config(policy, planner, false), seed);
      while (m.state().step < step && !m.finished()) m.step();
      const fs::path dir = output_path(out);
      fs::create_directories(dir);
      write_occupancy((dir / "occupancy.pgm").string(), m.state().occ);
      write_occupancy((dir / "inflated.pgm").string(), m.state().inflated);
      {
        auto os = open_out(dir / "posterior.csv");
        write_posterior_csv(os, m.state().post);
      }
      if (m.last_field()) {
        auto os = open_out(dir / "field.csv");
        write_field_csv(os, *m.last_field());
      }
      {
        auto os = open_out(dir / "frontiers.json");
        os << frontiers_to_json(m.last_occ_frontiers(), m.state().store.live()).dump(1) << '\n';
      }
      if (m.last_plan()) {
        auto os = open_out(dir / "plan.json");
        os << plan_to_json(*m.last_plan()).dump(1) << '\n';
      }
      std::cout << "snapshot after step " << m.state().step << " written to " << dir.string() << '\n';
      return kOk;
    }
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
