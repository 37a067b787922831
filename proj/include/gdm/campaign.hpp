#pragma once

#include "gdm/mission.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace gdm {

struct TrialResult {
  std::string config_id;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  bool early_terminated = false;
  std::vector<StepRecord> log;

  // Finals, taken from the last logged step.
  std::optional<double> final_rmse;
  double final_entropy = 0.0;
  double final_completeness = 0.0;
  double final_time = 0.0;
  std::optional<double> time_to_coverage;  // first t with completeness >= 0.9
};

/// Fills the final values of a trial from its log.
TrialResult make_trial_result(std::string config_id, std::uint64_t seed, std::vector<StepRecord> log,
                              bool early_terminated);

/// First violated log invariant, if any: completeness in [0, 1] and
/// nondecreasing, time within the budget, RMSE nonnegative, every logged pose
/// free in the inflated map.
std::optional<std::string> check_log_invariants(std::span<const StepRecord> log, double budget);

struct ConfigSummary {
  std::string id;
  int trials = 0;
  int failed = 0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  double entropy_mean = 0.0;
  double entropy_std = 0.0;
  double completeness_mean = 0.0;
  std::optional<double> rmse_reduction;     // percent, relative to the baseline
  std::optional<double> entropy_reduction;  // percent, relative to the baseline
};

struct CampaignSummary {
  std::vector<ConfigSummary> configs;
  std::string baseline_id;
  bool incomplete = false;  // at least one trial failed
};

struct CampaignResult {
  std::vector<TrialResult> trials;  // config-major, then seed
  CampaignSummary summary;
};

/// Mean and sample standard deviation of finals per config, in `order`.
/// Failed trials and trials without a defined RMSE are left out of the RMSE
/// statistics. Reductions are 100 (baseline - config) / baseline.
CampaignSummary summarize(std::span<const TrialResult> trials, std::span<const std::string> order,
                          const std::string& baseline_id);

/// Runs every config on seeds base_seed .. base_seed + trials - 1 using up to
/// `workers` threads. Trial outputs do not depend on the worker count. The
/// optional callback sees each finished trial from the calling thread, in
/// config-major order.
CampaignResult monte_carlo(const Scenario& scenario, std::span<const MissionConfig> configs, int trials,
                           std::uint64_t base_seed, int workers = 1, std::string baseline_id = "",
                           const std::function<void(const TrialResult&)>& on_trial = {});

/// One row per config: method, cost, trials, failed, RMSE_T mean/std, RMSE
/// reduction %, H_T mean/std, entropy reduction %, mean final completeness.
void write_campaign_csv(std::ostream& os, const CampaignSummary& summary);

}  // namespace gdm
