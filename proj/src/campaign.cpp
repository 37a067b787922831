#include "gdm/campaign.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>

namespace gdm {

namespace {

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return {std::nan(""), std::nan("")};
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::string csv_number(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string csv_number(const std::optional<double>& x) { return x ? csv_number(*x) : ""; }

}  // namespace

TrialResult make_trial_result(std::string config_id, std::uint64_t seed, std::vector<StepRecord> log,
                              bool early_terminated) {
  TrialResult r;
  r.config_id = std::move(config_id);
  r.seed = seed;
  r.early_terminated = early_terminated;
  r.log = std::move(log);
  if (!r.log.empty()) {
    const StepRecord& last = r.log.back();
    r.final_rmse = last.rmse;
    r.final_entropy = last.entropy;
    r.final_completeness = last.completeness;
    r.final_time = last.t;
  }
  for (const auto& s : r.log)
    if (s.completeness >= 0.9) {
      r.time_to_coverage = s.t;
      break;
    }
  return r;
}

std::optional<std::string> check_log_invariants(std::span<const StepRecord> log, double budget) {
  double prev = 0.0;
  for (const auto& r : log) {
    const std::string at = "step " + std::to_string(r.step) + ": ";
    if (!(r.completeness >= 0.0 && r.completeness <= 1.0)) return at + "completeness outside [0, 1]";
    if (r.completeness < prev) return at + "completeness decreased";
    prev = r.completeness;
    if (r.t > budget) return at + "elapsed time exceeds the budget";
    if (r.rmse && !(*r.rmse >= 0.0)) return at + "negative RMSE";
    if (!r.pose_safe) return at + "robot pose is not free in the inflated map";
  }
  return std::nullopt;
}

CampaignSummary summarize(std::span<const TrialResult> trials, std::span<const std::string> order,
                          const std::string& baseline_id) {
  CampaignSummary out;
  out.baseline_id = baseline_id;
  for (const auto& id : order) {
    ConfigSummary c;
    c.id = id;
    std::vector<double> rmse, entropy, completeness;
    for (const auto& t : trials) {
      if (t.config_id != id) continue;
      ++c.trials;
      if (t.failed) {
        ++c.failed;
        continue;
      }
      if (t.final_rmse) rmse.push_back(*t.final_rmse);
      entropy.push_back(t.final_entropy);
      completeness.push_back(t.final_completeness);
    }
    out.incomplete = out.incomplete || c.failed > 0;
    const Stats sr = stats(rmse), se = stats(entropy), sc = stats(completeness);
    c.rmse_mean = sr.mean;
    c.rmse_std = sr.std;
    c.entropy_mean = se.mean;
    c.entropy_std = se.std;
    c.completeness_mean = sc.mean;
    out.configs.push_back(std::move(c));
  }
  const ConfigSummary* base = nullptr;
  for (const auto& c : out.configs)
    if (c.id == baseline_id) base = &c;
  if (base) {
    const double br = base->rmse_mean, be = base->entropy_mean;
    for (auto& c : out.configs) {
      if (std::isfinite(br) && br != 0.0 && std::isfinite(c.rmse_mean)) c.rmse_reduction = 100.0 * (br - c.rmse_mean) / br;
      if (std::isfinite(be) && be != 0.0 && std::isfinite(c.entropy_mean))
        c.entropy_reduction = 100.0 * (be - c.entropy_mean) / be;
    }
  }
  return out;
}

CampaignResult monte_carlo(const Scenario& scenario, std::span<const MissionConfig> configs, int trials,
                           std::uint64_t base_seed, int workers, std::string baseline_id,
                           const std::function<void(const TrialResult&)>& on_trial) {
  if (trials < 1) throw PreconditionError("trials must be at least 1");
  if (configs.empty()) throw PreconditionError("no configurations to run");
  const std::size_t total = configs.size() * static_cast<std::size_t>(trials);
  std::vector<TrialResult> results(total);

  auto run_one = [&](std::size_t k) {
    const MissionConfig& cfg = configs[k / static_cast<std::size_t>(trials)];
    const std::uint64_t seed = base_seed + k % static_cast<std::size_t>(trials);
    try {
      MissionResult m = run_mission(scenario, cfg, seed);
      results[k] = make_trial_result(cfg.id, seed, std::move(m.log), m.early_terminated);
    } catch (const std::exception& e) {
      results[k] = TrialResult{};
      results[k].config_id = cfg.id;
      results[k].seed = seed;
      results[k].failed = true;
      results[k].error = e.what();
    }
  };

  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(total)));
  if (n_workers == 1) {
    for (std::size_t k = 0; k < total; ++k) {
      run_one(k);
      if (on_trial) on_trial(results[k]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < total; k = next++) run_one(k);
      });
    for (auto& t : pool) t.join();
    if (on_trial)
      for (const auto& r : results) on_trial(r);
  }

  if (baseline_id.empty())
    for (const auto& c : configs)
      if (c.method == Method::Baseline) {
        baseline_id = c.id;
        break;
      }
  std::vector<std::string> order;
  for (const auto& c : configs) order.push_back(c.id);
  CampaignResult out;
  out.summary = summarize(results, order, baseline_id);
  out.trials = std::move(results);
  return out;
}

void write_campaign_csv(std::ostream& os, const CampaignSummary& summary) {
  os << "# schema: gdm.campaign/1\n";
  os << "method,cost,trials,failed,rmse_T,rmse_std,rmse_reduction_pct,entropy_T,entropy_std,"
        "entropy_reduction_pct,completeness\n";
  for (const auto& c : summary.configs) {
    const auto slash = c.id.rfind('/');
    const std::string method = slash == std::string::npos ? c.id : c.id.substr(0, slash);
    const std::string cost = slash == std::string::npos ? "" : c.id.substr(slash + 1);
    os << method << ',' << cost << ',' << c.trials << ',' << c.failed << ',' << csv_number(c.rmse_mean) << ','
       << csv_number(c.rmse_std) << ',' << csv_number(c.rmse_reduction) << ',' << csv_number(c.entropy_mean) << ','
       << csv_number(c.entropy_std) << ',' << csv_number(c.entropy_reduction) << ','
       << csv_number(c.completeness_mean) << '\n';
  }
}

}  // namespace gdm
