#include "gdm/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gdm {

using nlohmann::json;

namespace {

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

std::string sidecar_path(const std::string& pgm_path) { return pgm_path + ".json"; }

// Shortest decimal form that parses back to the same double.
std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

json step_to_json(const StepRecord& r, bool with_timing) {
  json j;
  j["step"] = r.step;
  j["t"] = r.t;
  j["rmse"] = r.rmse ? json(*r.rmse) : json(nullptr);
  j["entropy"] = r.entropy;
  j["completeness"] = r.completeness;
  if (with_timing) j["plan_time_ms"] = r.plan_time_ms;
  j["goal_kind"] = r.goal_kind;
  j["fallback"] = r.fallback;
  j["path_length"] = r.path_length;
  j["observations"] = r.observations;
  j["position"] = point_json(r.position);
  j["pose_safe"] = r.pose_safe;
  return j;
}

StepRecord step_from_json(const json& j) {
  StepRecord r;
  r.step = j.at("step").get<int>();
  r.t = j.at("t").get<double>();
  if (!j.at("rmse").is_null()) r.rmse = j.at("rmse").get<double>();
  r.entropy = j.at("entropy").get<double>();
  r.completeness = j.at("completeness").get<double>();
  r.plan_time_ms = j.value("plan_time_ms", 0.0);
  r.goal_kind = j.at("goal_kind").get<std::string>();
  r.fallback = j.at("fallback").get<bool>();
  r.path_length = j.at("path_length").get<double>();
  r.observations = j.at("observations").get<std::size_t>();
  r.position = Point(j.at("position")[0].get<double>(), j.at("position")[1].get<double>());
  r.pose_safe = j.at("pose_safe").get<bool>();
  return r;
}

void write_step_log(std::ostream& os, const TrialResult& trial, bool with_timing) {
  json header{{"schema", "gdm.steplog"},
              {"version", kArtifactSchemaVersion},
              {"config", trial.config_id},
              {"seed", trial.seed},
              {"failed", trial.failed},
              {"early_terminated", trial.early_terminated}};
  if (trial.failed) header["error"] = trial.error;
  os << header.dump() << '\n';
  for (const auto& r : trial.log) os << step_to_json(r, with_timing).dump() << '\n';
}

StepLog read_step_log(std::istream& is) {
  StepLog out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw PreconditionError("step log line " + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1) {
      if (j.value("schema", "") != "gdm.steplog") throw PreconditionError("not a step log");
      if (j.value("version", 0) != kArtifactSchemaVersion) throw PreconditionError("unsupported step log version");
      out.header = std::move(j);
    } else {
      out.steps.push_back(step_from_json(j));
    }
  }
  if (out.header.is_null()) throw PreconditionError("empty step log");
  return out;
}

void write_occupancy(const std::string& pgm_path, const OccupancyGrid& grid) {
  const Lattice& lat = grid.lattice();
  std::ofstream pgm(pgm_path);
  if (!pgm) throw PreconditionError("cannot write " + pgm_path);
  pgm << "P2\n# gdm occupancy, resolution " << num(lat.resolution) << "\n"
      << lat.width << ' ' << lat.height << "\n255\n";
  for (int iy = lat.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < lat.width; ++ix) {
      const double p = grid.prob(lat.index({ix, iy}));
      pgm << static_cast<int>(std::lround(255.0 * (1.0 - p))) << (ix + 1 < lat.width ? ' ' : '\n');
    }
  }

  json side{{"schema", "gdm.occupancy"},
            {"version", kArtifactSchemaVersion},
            {"origin", point_json(lat.origin)},
            {"resolution", lat.resolution},
            {"width", lat.width},
            {"height", lat.height},
            {"tau_free", grid.tau_free()},
            {"tau_occ", grid.tau_occ()}};
  json probs = json::array();
  for (int i = 0; i < lat.size(); ++i) probs.push_back(grid.prob(i));
  side["probabilities"] = std::move(probs);
  std::ofstream js(sidecar_path(pgm_path));
  if (!js) throw PreconditionError("cannot write " + sidecar_path(pgm_path));
  js << side.dump() << '\n';
}

OccupancyGrid read_occupancy(const std::string& pgm_path) {
  std::ifstream in(sidecar_path(pgm_path));
  if (!in) throw PreconditionError("cannot read " + sidecar_path(pgm_path));
  const json j = json::parse(in);
  if (j.value("schema", "") != "gdm.occupancy") throw PreconditionError("not an occupancy sidecar");
  const Lattice lat(Point(j.at("origin")[0].get<double>(), j.at("origin")[1].get<double>()),
                    j.at("resolution").get<double>(), j.at("width").get<int>(), j.at("height").get<int>());
  OccupancyGrid grid(lat, j.at("tau_free").get<double>(), j.at("tau_occ").get<double>());
  const auto& probs = j.at("probabilities");
  if (static_cast<int>(probs.size()) != lat.size()) throw PreconditionError("probability count mismatch");
  for (int i = 0; i < lat.size(); ++i) grid.set_prob(i, probs[i].get<double>());
  return grid;
}

void write_posterior_csv(std::ostream& os, const GasPosterior& post) {
  os << "# schema: gdm.posterior/1\n";
  os << "cell,ix,iy,x,y,mean,variance,prior_variance\n";
  for (std::size_t s = 0; s < post.cells.size(); ++s) {
    const int c = post.cells[s];
    const Cell cc = post.lattice.cell(c);
    const Point p = post.lattice.center(c);
    os << c << ',' << cc.ix << ',' << cc.iy << ',' << num(p.x()) << ',' << num(p.y()) << ','
       << num(post.mean[static_cast<Eigen::Index>(s)]) << ',' << num(post.variance[static_cast<Eigen::Index>(s)])
       << ',' << num(post.prior_variance[static_cast<Eigen::Index>(s)]) << '\n';
  }
}

void write_field_csv(std::ostream& os, const InfoField& field) {
  os << "# schema: gdm.field/1\n";
  os << "cell,x,y,raw,i_hat,penalty\n";
  for (std::size_t s = 0; s < field.cells.size(); ++s) {
    const int c = field.cells[s];
    const Point p = field.lattice.center(c);
    const auto k = static_cast<Eigen::Index>(s);
    os << c << ',' << num(p.x()) << ',' << num(p.y()) << ',' << num(field.raw[k]) << ',' << num(field.i_hat[k])
       << ',' << num(field.penalty[k]) << '\n';
  }
}

json frontiers_to_json(std::span<const Frontier> occupancy, std::span<const Frontier> gas) {
  auto one = [](const Frontier& f) {
    return json{{"id", f.id},
                {"kind", std::string(to_string(f.kind))},
                {"created_step", f.created_step},
                {"centroid", point_json(f.centroid)},
                {"cells", f.cells}};
  };
  json out{{"schema", "gdm.frontiers"}, {"version", kArtifactSchemaVersion}};
  out["occupancy"] = json::array();
  for (const auto& f : occupancy) out["occupancy"].push_back(one(f));
  out["gas"] = json::array();
  for (const auto& f : gas) out["gas"].push_back(one(f));
  return out;
}

json plan_to_json(const PlanResult& plan) {
  json out{{"schema", "gdm.plan"}, {"version", kArtifactSchemaVersion}, {"radius", plan.radius}};
  json vertices = json::array();
  for (int v = 0; v < plan.tree.size(); ++v) {
    if (!plan.tree.in_tree[v]) continue;
    vertices.push_back({{"id", v},
                        {"position", point_json(plan.tree.points[v])},
                        {"parent", plan.tree.parent[v]},
                        {"g", plan.tree.g[v]}});
  }
  out["vertices"] = std::move(vertices);
  json goals = json::array();
  for (const auto& g : plan.goals)
    goals.push_back({{"nominal", point_json(g.nominal)},
                     {"members", g.members},
                     {"frontier_id", g.frontier_id},
                     {"kind", std::string(to_string(g.kind))},
                     {"solved", g.solved}});
  out["goals"] = std::move(goals);
  json trajs = json::array();
  for (const auto& t : plan.trajectories) {
    json wp = json::array();
    for (const auto& p : t.waypoints) wp.push_back(point_json(p));
    trajs.push_back({{"goal", t.goal},
                     {"frontier_id", t.frontier_id},
                     {"kind", std::string(to_string(t.kind))},
                     {"cost", t.cost},
                     {"length", t.length()},
                     {"waypoints", std::move(wp)}});
  }
  out["trajectories"] = std::move(trajs);
  out["stats"] = {{"expansions", plan.stats.expansions},
                  {"edges_queued", plan.stats.edges_queued},
                  {"collision_checks", plan.stats.collision_checks},
                  {"rewires", plan.stats.rewires}};
  return out;
}

}  // namespace gdm
