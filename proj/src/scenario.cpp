#include "gdm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace gdm {

using nlohmann::json;

std::optional<double> Rect::ray_hit(const Point& o, const Point& d) const {
  constexpr double kGraze = 1e-9;  // m
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] <= min[k] || o[k] >= max[k]) return std::nullopt;
      continue;
    }
    double ta = (min[k] - o[k]) / d[k];
    double tb = (max[k] - o[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t1 - t0 <= kGraze) return std::nullopt;
  return t0;
}

bool Rect::intersects_segment(const Point& a, const Point& b) const {
  const Point d = b - a;
  double t0 = 0.0, t1 = 1.0;
  for (int k = 0; k < 2; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (a[k] < min[k] || a[k] > max[k]) return false;
      continue;
    }
    double ta = (min[k] - a[k]) / d[k];
    double tb = (max[k] - a[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

Lattice Scenario::lattice() const {
  const int w = static_cast<int>(std::lround(size.x() / resolution));
  const int h = static_cast<int>(std::lround(size.y() / resolution));
  return Lattice(origin, resolution, w, h);
}

bool Scenario::in_obstacle(const Point& p) const {
  for (const auto& r : obstacles)
    if (r.contains(p)) return true;
  return false;
}

namespace {

Point point_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw PreconditionError("'" + key + "' must be a two-element numeric array");
  return {j[0].get<double>(), j[1].get<double>()};
}

json point_to(const Point& p) { return json::array({p.x(), p.y()}); }

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw PreconditionError("'" + where + key + "' has the wrong type");
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw PreconditionError(std::string("'") + key + "' must be an object");
  return j.at(key);
}

Rect rect_from(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("min") || !j.contains("max"))
    throw PreconditionError("'" + where + "' needs 'min' and 'max'");
  Rect r{point_from(j.at("min"), where + ".min"), point_from(j.at("max"), where + ".max")};
  if (!(r.min.x() < r.max.x() && r.min.y() < r.max.y()))
    throw PreconditionError("'" + where + "' must have min < max on both axes");
  return r;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw PreconditionError("scenario must be a JSON object");
  if (j.contains("schema_version") && j.at("schema_version") != 1)
    throw PreconditionError("unsupported schema_version");
  Scenario s;
  read(j, "name", s.name, "");

  if (!j.contains("bounds")) throw PreconditionError("missing required key 'bounds'");
  const json& b = section(j, "bounds");
  if (b.contains("origin")) s.origin = point_from(b.at("origin"), "bounds.origin");
  if (!b.contains("size")) throw PreconditionError("missing required key 'bounds.size'");
  s.size = point_from(b.at("size"), "bounds.size");
  read(b, "resolution", s.resolution, "bounds.");

  if (j.contains("obstacles")) {
    if (!j.at("obstacles").is_array()) throw PreconditionError("'obstacles' must be an array");
    for (std::size_t i = 0; i < j.at("obstacles").size(); ++i)
      s.obstacles.push_back(rect_from(j.at("obstacles")[i], "obstacles[" + std::to_string(i) + "]"));
  }
  if (j.contains("sources")) {
    if (!j.at("sources").is_array()) throw PreconditionError("'sources' must be an array");
    for (std::size_t i = 0; i < j.at("sources").size(); ++i) {
      const json& src = j.at("sources")[i];
      const std::string where = "sources[" + std::to_string(i) + "]";
      if (!src.is_object() || !src.contains("position")) throw PreconditionError("'" + where + "' needs 'position'");
      GasSource g;
      g.position = point_from(src.at("position"), where + ".position");
      read(src, "rate", g.rate, where + ".");
      s.sources.push_back(g);
    }
  }

  const json& w = section(j, "wind");
  double dir_deg = s.wind_direction * 180.0 / std::numbers::pi;
  read(w, "direction_deg", dir_deg, "wind.");
  s.wind_direction = dir_deg * std::numbers::pi / 180.0;
  read(w, "speed", s.wind_speed, "wind.");

  const json& pl = section(j, "plume");
  read(pl, "sigma0", s.plume.sigma0, "plume.");
  read(pl, "k_along", s.plume.k_along, "plume.");
  read(pl, "k_cross", s.plume.k_cross, "plume.");
  read(pl, "residence", s.plume.residence, "plume.");

  if (!j.contains("robot")) throw PreconditionError("missing required key 'robot'");
  const json& r = section(j, "robot");
  if (!r.contains("start")) throw PreconditionError("missing required key 'robot.start'");
  s.start.position = point_from(r.at("start"), "robot.start");
  double heading_deg = 0.0;
  read(r, "heading_deg", heading_deg, "robot.");
  s.start.heading = heading_deg * std::numbers::pi / 180.0;
  read(r, "speed", s.speed, "robot.");
  read(r, "inflation", s.inflation, "robot.");

  const json& se = section(j, "sensors");
  read(se, "gas_rate_hz", s.gas_rate_hz, "sensors.");
  read(se, "gas_noise", s.gas_noise, "sensors.");
  const json& li = section(se, "lidar");
  read(li, "rays", s.lidar.rays, "sensors.lidar.");
  read(li, "max_range", s.lidar.max_range, "sensors.lidar.");
  read(li, "noise", s.lidar.noise, "sensors.lidar.");
  read(li, "rate_hz", s.lidar.rate_hz, "sensors.lidar.");

  const json& m = section(j, "mapping");
  read(m, "tau_free", s.tau_free, "mapping.");
  read(m, "tau_occ", s.tau_occ, "mapping.");
  read(m, "initial_scans", s.initial_scans, "mapping.");

  const json& g = section(j, "gmrf");
  read(g, "sigma_r2", s.gmrf.sigma_r2, "gmrf.");
  read(g, "sigma_s2", s.gmrf.sigma_s2, "gmrf.");
  read(g, "sigma_zeta2", s.gmrf.sigma_zeta2, "gmrf.");
  read(g, "sigma_d2", s.gmrf.sigma_d2, "gmrf.");
  read(g, "kappa", s.kappa, "gmrf.");

  const json& f = section(j, "frontier");
  read(f, "min_size", s.min_frontier_size, "frontier.");
  read(f, "percentile", s.percentile, "frontier.");
  read(f, "tau_gas_min", s.tau_gas_min, "frontier.");

  const json& ev = section(j, "evaluation");
  read(ev, "z_thresh", s.z_thresh, "evaluation.");

  if (!j.contains("budget")) throw PreconditionError("missing required key 'budget'");
  read(j, "budget", s.budget, "");
  const json& sd = section(j, "seeds");
  read(sd, "base", s.base_seed, "seeds.");

  const json& p = section(j, "planner");
  read(p, "N", s.planner.n_samples, "planner.");
  read(p, "max_goals", s.planner.max_goals, "planner.");
  read(p, "k_n", s.planner.k_n, "planner.");
  read(p, "epsilon_mix", s.planner.epsilon_mix, "planner.");
  read(p, "alpha", s.planner.alpha, "planner.");
  read(p, "beta", s.planner.beta, "planner.");
  read(p, "gamma_scale", s.planner.gamma_scale, "planner.");
  if (p.contains("heuristic")) {
    std::string name;
    read(p, "heuristic", name, "planner.");
    auto mode = parse_heuristic_mode(name);
    if (!mode) throw PreconditionError("'planner.heuristic' must be distance_only or ucb_aware");
    s.planner.heuristic = *mode;
  }
  if (j.contains("convergence")) {
    const json& c = section(j, "convergence");
    if (c.contains("goal")) s.goal = point_from(c.at("goal"), "convergence.goal");
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = 1;
  j["name"] = s.name;
  j["bounds"] = {{"origin", point_to(s.origin)}, {"size", point_to(s.size)}, {"resolution", s.resolution}};
  j["obstacles"] = json::array();
  for (const auto& r : s.obstacles) j["obstacles"].push_back({{"min", point_to(r.min)}, {"max", point_to(r.max)}});
  j["sources"] = json::array();
  for (const auto& g : s.sources) j["sources"].push_back({{"position", point_to(g.position)}, {"rate", g.rate}});
  j["wind"] = {{"direction_deg", s.wind_direction * 180.0 / std::numbers::pi}, {"speed", s.wind_speed}};
  j["plume"] = {{"sigma0", s.plume.sigma0},
                {"k_along", s.plume.k_along},
                {"k_cross", s.plume.k_cross},
                {"residence", s.plume.residence}};
  j["robot"] = {{"start", point_to(s.start.position)},
                {"heading_deg", s.start.heading * 180.0 / std::numbers::pi},
                {"speed", s.speed},
                {"inflation", s.inflation}};
  j["sensors"] = {{"gas_rate_hz", s.gas_rate_hz},
                  {"gas_noise", s.gas_noise},
                  {"lidar",
                   {{"rays", s.lidar.rays},
                    {"max_range", s.lidar.max_range},
                    {"noise", s.lidar.noise},
                    {"rate_hz", s.lidar.rate_hz}}}};
  j["mapping"] = {{"tau_free", s.tau_free}, {"tau_occ", s.tau_occ}, {"initial_scans", s.initial_scans}};
  j["gmrf"] = {{"sigma_r2", s.gmrf.sigma_r2},
               {"sigma_s2", s.gmrf.sigma_s2},
               {"sigma_zeta2", s.gmrf.sigma_zeta2},
               {"sigma_d2", s.gmrf.sigma_d2},
               {"kappa", s.kappa}};
  j["frontier"] = {{"min_size", s.min_frontier_size}, {"percentile", s.percentile}, {"tau_gas_min", s.tau_gas_min}};
  j["evaluation"] = {{"z_thresh", s.z_thresh}};
  j["budget"] = s.budget;
  j["seeds"] = {{"base", s.base_seed}};
  j["planner"] = {{"N", s.planner.n_samples},
                  {"max_goals", s.planner.max_goals},
                  {"k_n", s.planner.k_n},
                  {"epsilon_mix", s.planner.epsilon_mix},
                  {"alpha", s.planner.alpha},
                  {"beta", s.planner.beta},
                  {"gamma_scale", s.planner.gamma_scale},
                  {"heuristic", std::string(to_string(s.planner.heuristic))}};
  if (s.goal) j["convergence"] = {{"goal", point_to(*s.goal)}};
  return j;
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> errs;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  check(s.resolution > 0.0, "bounds.resolution must be positive");
  check(s.size.x() > 0.0 && s.size.y() > 0.0, "bounds.size must be positive");
  if (!errs.empty()) return errs;
  const double cells_x = s.size.x() / s.resolution, cells_y = s.size.y() / s.resolution;
  check(std::abs(cells_x - std::round(cells_x)) < 1e-6 && std::abs(cells_y - std::round(cells_y)) < 1e-6,
        "bounds.size must be a whole number of cells");
  auto inside = [&](const Point& p) {
    return p.x() >= s.origin.x() && p.y() >= s.origin.y() && p.x() < s.origin.x() + s.size.x() &&
           p.y() < s.origin.y() + s.size.y();
  };
  check(inside(s.start.position), "robot.start lies outside the bounds");
  check(!s.in_obstacle(s.start.position), "robot.start lies inside an obstacle");
  if (s.goal) {
    check(inside(*s.goal), "convergence.goal lies outside the bounds");
    check(!s.in_obstacle(*s.goal), "convergence.goal lies inside an obstacle");
  }
  for (const auto& r : s.obstacles) {
    const Point c = r.min.cwiseMax(s.start.position).cwiseMin(r.max);
    if ((c - s.start.position).norm() <= s.inflation && !r.contains(s.start.position)) {
      errs.push_back("robot.start lies within the inflation radius of an obstacle");
      break;
    }
  }
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    check(inside(s.sources[i].position), "sources[" + std::to_string(i) + "] lies outside the bounds");
    check(s.sources[i].rate >= 0.0, "sources[" + std::to_string(i) + "].rate must be nonnegative");
  }
  check(s.wind_speed >= 0.0, "wind.speed must be nonnegative");
  check(s.plume.sigma0 > 0.0 && s.plume.k_along >= 0.0 && s.plume.k_cross >= 0.0 && s.plume.residence > 0.0,
        "plume parameters out of range");
  check(s.speed > 0.0, "robot.speed must be positive");
  check(s.inflation >= 0.0, "robot.inflation must be nonnegative");
  check(s.gas_rate_hz > 0.0, "sensors.gas_rate_hz must be positive");
  check(s.gas_noise >= 0.0, "sensors.gas_noise must be nonnegative");
  check(s.lidar.rays >= 1 && s.lidar.max_range > 0.0 && s.lidar.noise >= 0.0 && s.lidar.rate_hz > 0.0,
        "sensors.lidar parameters out of range");
  check(s.tau_free > 0.0 && s.tau_free <= 0.5 && s.tau_occ >= 0.5 && s.tau_occ < 1.0 && s.tau_occ > s.tau_free,
        "mapping thresholds out of range");
  check(s.initial_scans >= 1, "mapping.initial_scans must be at least 1");
  check(s.gmrf.sigma_r2 > 0.0 && s.gmrf.sigma_s2 > 0.0 && s.gmrf.sigma_zeta2 > 0.0 && s.gmrf.sigma_d2 > 0.0,
        "gmrf variances must be positive");
  check(s.kappa > 0.0 && s.kappa <= 1.0, "gmrf.kappa must lie in (0, 1]");
  check(s.min_frontier_size >= 1, "frontier.min_size must be at least 1");
  check(s.percentile > 0.0 && s.percentile <= 100.0, "frontier.percentile must lie in (0, 100]");
  check(s.tau_gas_min > 0.0, "frontier.tau_gas_min must be positive");
  check(s.z_thresh > 0.0, "evaluation.z_thresh must be positive");
  check(s.budget >= 0.0, "budget must be nonnegative");
  try {
    s.planner.validate();
  } catch (const PreconditionError& e) {
    errs.push_back(std::string("planner: ") + e.what());
  }
  return errs;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw PreconditionError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": parse error: " +
                            e.what());
  }
  Scenario s;
  try {
    s = scenario_from_json(j);
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
  const auto errs = validate_scenario(s);
  if (!errs.empty()) {
    std::string msg = path + ": invalid scenario";
    for (const auto& e : errs) msg += "\n  " + e;
    throw PreconditionError(msg);
  }
  return s;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace gdm
