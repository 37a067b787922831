#pragma once

#include "gdm/campaign.hpp"
#include "gdm/frontier.hpp"
#include "gdm/gas.hpp"
#include "gdm/grid.hpp"
#include "gdm/info_field.hpp"
#include "gdm/mission.hpp"
#include "gdm/planner.hpp"

#include "json.hpp"

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace gdm {

inline constexpr int kArtifactSchemaVersion = 1;

nlohmann::json step_to_json(const StepRecord& r, bool with_timing);
StepRecord step_from_json(const nlohmann::json& j);

/// JSON Lines: a header object, then one object per step. plan_time_ms is
/// written only when `with_timing` is set, so default logs are reproducible.
void write_step_log(std::ostream& os, const TrialResult& trial, bool with_timing = false);

struct StepLog {
  nlohmann::json header;
  std::vector<StepRecord> steps;
};
StepLog read_step_log(std::istream& is);

/// Occupancy as an ASCII PGM (0 = occupied, 255 = free, rows top to bottom)
/// plus a JSON sidecar holding the lattice and the exact probabilities.
void write_occupancy(const std::string& pgm_path, const OccupancyGrid& grid);
/// Reads the sidecar written next to `pgm_path`.
OccupancyGrid read_occupancy(const std::string& pgm_path);

void write_posterior_csv(std::ostream& os, const GasPosterior& post);
void write_field_csv(std::ostream& os, const InfoField& field);
nlohmann::json frontiers_to_json(std::span<const Frontier> occupancy, std::span<const Frontier> gas);
nlohmann::json plan_to_json(const PlanResult& plan);

}  // namespace gdm
