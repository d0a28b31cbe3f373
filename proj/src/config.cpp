#include "encl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "encl/errors.hpp"

namespace encl {

using nlohmann::json;

namespace {

[[noreturn]] void cfg_fail(const std::string& path, const std::string& what) {
  fail(Errc::config_error, path + ": " + what);
}

const json* find(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

const json& need(const json& j, const char* key, const std::string& path) {
  const json* p = find(j, key);
  if (!p) cfg_fail(path + "." + key, "missing required field");
  return *p;
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) cfg_fail(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) cfg_fail(path, "expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) cfg_fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) cfg_fail(path, "expected a string");
  return j.get<std::string>();
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) cfg_fail(path, "expected [x, y, z]");
  return {num(j[0], path), num(j[1], path), num(j[2], path)};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

ProbeBall probe_from_json(const json& j, const std::string& path) {
  ProbeBall p;
  p.center = vec3(need(j, "center", path), path + ".center");
  p.radius = num(need(j, "radius", path), path + ".radius");
  if (p.radius <= 0.0) cfg_fail(path + ".radius", "must be positive");
  p.amplitude = find(j, "amplitude") ? num(*find(j, "amplitude"), path + ".amplitude") : 1.0;
  if (p.amplitude == 0.0) cfg_fail(path + ".amplitude", "must be nonzero");
  return p;
}

std::vector<ProbeBall> probes_from_json(const json& j, const std::string& path) {
  std::vector<ProbeBall> out;
  if (j.is_array()) {
    if (j.empty()) cfg_fail(path, "probe list must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(probe_from_json(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }
  if (!j.is_object()) cfg_fail(path, "expected a probe list or a generator");
  std::string placement = str(need(j, "placement", path), path + ".placement");
  double distance = num(need(j, "distance", path), path + ".distance");
  double radius = num(need(j, "radius", path), path + ".radius");
  double amplitude = find(j, "amplitude") ? num(*find(j, "amplitude"), path) : 1.0;
  Vec3 about = find(j, "about") ? vec3(*find(j, "about"), path + ".about") : Vec3{};
  if (placement == "axes") {
    for (int a = 0; a < 3; ++a)
      for (int s = -1; s <= 1; s += 2) {
        Vec3 dir{a == 0 ? (double)s : 0.0, a == 1 ? (double)s : 0.0,
                 a == 2 ? (double)s : 0.0};
        out.push_back({about + dir * distance, radius, amplitude});
      }
    return out;
  }
  if (placement == "fibonacci") {
    int count = integer(need(j, "count", path), path + ".count");
    if (count < 1) cfg_fail(path + ".count", "must be positive");
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double zc = count == 1 ? 0.0 : 1.0 - (2.0 * i + 1.0) / count;
      double r = std::sqrt(std::fmax(0.0, 1.0 - zc * zc));
      double phi = ga * i;
      Vec3 dir{r * std::cos(phi), r * std::sin(phi), zc};
      out.push_back({about + dir * distance, radius, amplitude});
    }
    return out;
  }
  cfg_fail(path + ".placement", "unknown placement '" + placement + "'");
}

}  // namespace

Shape shape_from_json(const json& j, const std::string& path) {
  std::string type = str(need(j, "type", path), path + ".type");
  if (type == "sphere") {
    double r = num(need(j, "radius", path), path + ".radius");
    return Shape::sphere(vec3(need(j, "center", path), path + ".center"), r);
  }
  if (type == "box") {
    return Shape::box(vec3(need(j, "lo", path), path + ".lo"),
                      vec3(need(j, "hi", path), path + ".hi"));
  }
  if (type == "union") {
    const json& parts = need(j, "parts", path);
    if (!parts.is_array() || parts.empty())
      cfg_fail(path + ".parts", "expected a nonempty array of shapes");
    std::vector<Shape> out;
    for (std::size_t i = 0; i < parts.size(); ++i)
      out.push_back(shape_from_json(parts[i], path + ".parts[" + std::to_string(i) + "]"));
    return Shape::unite(std::move(out));
  }
  cfg_fail(path + ".type", "unknown shape type '" + type + "'");
}

json shape_to_json(const Shape& s) {
  if (const auto* sp = std::get_if<Sphere>(&s.variant()))
    return json{{"type", "sphere"}, {"center", vec3_to_json(sp->center)}, {"radius", sp->radius}};
  if (const auto* b = std::get_if<AxisBox>(&s.variant()))
    return json{{"type", "box"}, {"lo", vec3_to_json(b->lo)}, {"hi", vec3_to_json(b->hi)}};
  const auto& u = std::get<ShapeUnion>(s.variant());
  json parts = json::array();
  for (const auto& p : u.parts) parts.push_back(shape_to_json(p));
  return json{{"type", "union"}, {"parts", parts}};
}

std::vector<double> TauSpec::values() const {
  if (count < 1) fail(Errc::config_error, "tau.count must be positive");
  if (min <= 0.0 || max < min) fail(Errc::config_error, "tau range must be positive and increasing");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = min;
    return v;
  }
  for (int i = 0; i < count; ++i) {
    double t = (double)i / (count - 1);
    v[i] = geometric ? min * std::pow(max / min, t) : min + t * (max - min);
  }
  return v;
}

RunConfig RunConfig::from_json(const json& j, const std::string& source) {
  RunConfig cfg;
  const std::string root = source;
  if (const json* seed = find(j, "seed")) cfg.seed = (std::uint64_t)integer(*seed, root + ".seed");

  const json& scene = need(j, "scene", root);
  const std::string spath = root + ".scene";
  if (const json* ob = find(scene, "obstacle")) {
    ObstacleSpec spec{shape_from_json(need(*ob, "shape", spath + ".obstacle"),
                                      spath + ".obstacle.shape")};
    std::string kind = str(need(*ob, "kind", spath + ".obstacle"), spath + ".obstacle.kind");
    if (kind == "sound_hard") {
      spec.sound_hard = true;
    } else if (kind == "penetrable") {
      spec.sound_hard = false;
      spec.contrast = num(need(*ob, "contrast", spath + ".obstacle"),
                          spath + ".obstacle.contrast");
      if (spec.contrast <= 0.0)
        fail(Errc::non_positive_contrast, spath + ".obstacle.contrast must be positive");
    } else {
      cfg_fail(spath + ".obstacle.kind", "expected 'sound_hard' or 'penetrable'");
    }
    cfg.obstacle = std::move(spec);
  }
  if (const json* surf = find(scene, "surface"))
    cfg.surface = shape_from_json(*surf, spath + ".surface");

  const json& grid = need(scene, "grid", spath);
  cfg.grid.h = num(need(grid, "h", spath + ".grid"), spath + ".grid.h");
  if (cfg.grid.h <= 0.0) cfg_fail(spath + ".grid.h", "must be positive");
  if (const json* m = find(grid, "margin_cells"))
    cfg.grid.margin_cells = integer(*m, spath + ".grid.margin_cells");
  if (const json* lo = find(grid, "lo")) cfg.grid.lo = vec3(*lo, spath + ".grid.lo");
  if (const json* hi = find(grid, "hi")) cfg.grid.hi = vec3(*hi, spath + ".grid.hi");
  if (cfg.grid.lo.has_value() != cfg.grid.hi.has_value())
    cfg_fail(spath + ".grid", "lo and hi must be given together");

  cfg.probes = probes_from_json(need(j, "probes", root), root + ".probes");

  if (const json* solver = find(j, "solver")) {
    const std::string sp = root + ".solver";
    if (const json* v = find(*solver, "cfl")) cfg.solver.cfl = num(*v, sp + ".cfl");
    if (const json* v = find(*solver, "T")) {
      if (v->is_string()) {
        if (str(*v, sp + ".T") != "auto") cfg_fail(sp + ".T", "expected a number or 'auto'");
        cfg.solver.t_auto = true;
      } else {
        cfg.solver.T = num(*v, sp + ".T");
        cfg.solver.t_auto = false;
        if (cfg.solver.T < 0.0) cfg_fail(sp + ".T", "must be nonnegative");
      }
    }
    if (const json* v = find(*solver, "T_factor")) cfg.solver.T_factor = num(*v, sp + ".T_factor");
    if (const json* v = find(*solver, "distance_bound"))
      cfg.solver.distance_bound = num(*v, sp + ".distance_bound");
    if (const json* v = find(*solver, "sponge")) {
      if (const json* t = find(*v, "thickness"))
        cfg.solver.sponge.thickness = integer(*t, sp + ".sponge.thickness");
      if (const json* t = find(*v, "strength"))
        cfg.solver.sponge.strength = num(*t, sp + ".sponge.strength");
      if (const json* t = find(*v, "exponent"))
        cfg.solver.sponge.exponent = integer(*t, sp + ".sponge.exponent");
    }
    if (const json* v = find(*solver, "source_sampling")) {
      std::string s = str(*v, sp + ".source_sampling");
      if (s == "center") cfg.solver.source_sampling = SourceSampling::CellCenter;
      else if (s == "mean") cfg.solver.source_sampling = SourceSampling::SphericalMean;
      else cfg_fail(sp + ".source_sampling", "expected 'center' or 'mean'");
    }
    if (const json* v = find(*solver, "threads")) cfg.solver.threads = integer(*v, sp + ".threads");
    if (const json* v = find(*solver, "nan_check_every"))
      cfg.solver.nan_check_every = integer(*v, sp + ".nan_check_every");
    if (const json* v = find(*solver, "energy_every"))
      cfg.solver.energy_every = integer(*v, sp + ".energy_every");
  }

  if (const json* tau = find(j, "tau")) {
    const std::string tp = root + ".tau";
    if (const json* v = find(*tau, "min")) cfg.tau.min = num(*v, tp + ".min");
    if (const json* v = find(*tau, "max")) cfg.tau.max = num(*v, tp + ".max");
    if (const json* v = find(*tau, "count")) cfg.tau.count = integer(*v, tp + ".count");
    if (const json* v = find(*tau, "spacing")) {
      std::string s = str(*v, tp + ".spacing");
      if (s == "linear") cfg.tau.geometric = false;
      else if (s == "geometric") cfg.tau.geometric = true;
      else cfg_fail(tp + ".spacing", "expected 'linear' or 'geometric'");
    }
  }

  if (const json* ind = find(j, "indicator")) {
    const std::string ip = root + ".indicator";
    if (const json* v = find(*ind, "mode")) {
      std::string s = str(*v, ip + ".mode");
      if (s == "reference") cfg.mode = IndicatorMode::Reference;
      else if (s == "direct") cfg.mode = IndicatorMode::Direct;
      else cfg_fail(ip + ".mode", "expected 'reference' or 'direct'");
    }
    if (const json* v = find(*ind, "floor_factor"))
      cfg.floor_factor = num(*v, ip + ".floor_factor");
  }

  if (const json* v = find(j, "surface_resolution"))
    cfg.surface_resolution = integer(*v, root + ".surface_resolution");

  if (const json* rec = find(j, "reconstruct")) {
    if (const json* v = find(*rec, "safety"))
      cfg.safety = num(*v, root + ".reconstruct.safety");
    if (cfg.safety < 0.0 || cfg.safety >= 1.0)
      cfg_fail(root + ".reconstruct.safety", "must lie in [0, 1)");
  }

  if (const json* fwd = find(j, "forward")) {
    const std::string fp = root + ".forward";
    if (const json* v = find(*fwd, "oracle_check"))
      cfg.oracle_check = boolean(*v, fp + ".oracle_check");
    if (const json* v = find(*fwd, "record_points")) {
      if (!v->is_array()) cfg_fail(fp + ".record_points", "expected an array of points");
      for (std::size_t i = 0; i < v->size(); ++i)
        cfg.record_points.push_back(
            vec3((*v)[i], fp + ".record_points[" + std::to_string(i) + "]"));
    }
  }

  if (const json* out = find(j, "output")) {
    const std::string op = root + ".output";
    if (const json* v = find(*out, "dir")) cfg.output.dir = str(*v, op + ".dir");
    if (const json* v = find(*out, "snapshot_every"))
      cfg.output.snapshot_every = integer(*v, op + ".snapshot_every");
    if (const json* v = find(*out, "write_traces"))
      cfg.output.write_traces = boolean(*v, op + ".write_traces");
    if (const json* v = find(*out, "trace_decimate"))
      cfg.output.trace_decimate = integer(*v, op + ".trace_decimate");
  }

  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::config_error, "cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    // Recover a line number from the byte offset for the message.
    std::ifstream g(path);
    std::string text((std::istreambuf_iterator<char>(g)), std::istreambuf_iterator<char>());
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    fail(Errc::config_error,
         path + ":" + std::to_string(line) + ": " + std::string(e.what()));
  }
  return from_json(j, path);
}

json RunConfig::to_json() const {
  json scene;
  if (obstacle) {
    json ob{{"shape", shape_to_json(obstacle->shape)}};
    ob["kind"] = obstacle->sound_hard ? "sound_hard" : "penetrable";
    if (!obstacle->sound_hard) ob["contrast"] = obstacle->contrast;
    scene["obstacle"] = ob;
  }
  if (surface) scene["surface"] = shape_to_json(*surface);
  json grid_j{{"h", grid.h}, {"margin_cells", grid.margin_cells}};
  if (grid.lo) grid_j["lo"] = vec3_to_json(*grid.lo);
  if (grid.hi) grid_j["hi"] = vec3_to_json(*grid.hi);
  scene["grid"] = grid_j;

  json probes_j = json::array();
  for (const auto& p : probes)
    probes_j.push_back({{"center", vec3_to_json(p.center)},
                        {"radius", p.radius},
                        {"amplitude", p.amplitude}});

  json solver_j{
      {"cfl", solver.cfl},
      {"T_factor", solver.T_factor},
      {"sponge",
       {{"thickness", solver.sponge.thickness},
        {"strength", solver.sponge.strength},
        {"exponent", solver.sponge.exponent}}},
      {"source_sampling",
       solver.source_sampling == SourceSampling::CellCenter ? "center" : "mean"},
      {"threads", solver.threads},
      {"nan_check_every", solver.nan_check_every},
      {"energy_every", solver.energy_every}};
  if (solver.t_auto) solver_j["T"] = "auto";
  else solver_j["T"] = solver.T;
  if (solver.distance_bound) solver_j["distance_bound"] = *solver.distance_bound;

  json record = json::array();
  for (const auto& p : record_points) record.push_back(vec3_to_json(p));

  return json{
      {"seed", seed},
      {"scene", scene},
      {"probes", probes_j},
      {"solver", solver_j},
      {"tau",
       {{"min", tau.min},
        {"max", tau.max},
        {"count", tau.count},
        {"spacing", tau.geometric ? "geometric" : "linear"}}},
      {"indicator",
       {{"mode", mode == IndicatorMode::Reference ? "reference" : "direct"},
        {"floor_factor", floor_factor}}},
      {"surface_resolution", surface_resolution},
      {"reconstruct", {{"safety", safety}}},
      {"forward", {{"oracle_check", oracle_check}, {"record_points", record}}},
      {"output",
       {{"dir", output.dir},
        {"snapshot_every", output.snapshot_every},
        {"write_traces", output.write_traces},
        {"trace_decimate", output.trace_decimate}}},
  };
}

Scene build_scene(const RunConfig& cfg) {
  Scene scene;
  const double h = cfg.grid.h;
  const int sponge = cfg.solver.sponge.thickness;
  if (cfg.grid.lo && cfg.grid.hi) {
    scene.grid = Grid3::from_bounds(*cfg.grid.lo, *cfg.grid.hi, h);
  } else {
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    auto absorb = [&](const std::pair<Vec3, Vec3>& bb) {
      lo = cwise_min(lo, bb.first);
      hi = cwise_max(hi, bb.second);
    };
    if (cfg.surface) absorb(cfg.surface->bounding_box());
    if (cfg.obstacle) absorb(cfg.obstacle->shape.bounding_box());
    for (const auto& p : cfg.probes) absorb(p.shape().bounding_box());
    if (lo.x > hi.x) fail(Errc::config_error, "scene is empty; nothing to size the grid on");
    int margin = cfg.grid.margin_cells >= 0 ? cfg.grid.margin_cells : 2 * sponge;
    double pad = (margin + sponge) * h;
    scene.grid = Grid3::from_bounds(lo - Vec3{pad, pad, pad}, hi + Vec3{pad, pad, pad}, h);
  }

  // Geometric constraints of the scene.
  if (cfg.obstacle && cfg.surface) {
    for (const auto& x : cfg.obstacle->shape.boundary_samples(2048))
      if (cfg.surface->sdf(x) > -2.0 * h)
        fail(Errc::config_error,
             "obstacle must stay at least two cells inside the surface");
  }
  for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
    const auto& p = cfg.probes[i];
    if (cfg.surface && dist_sets(p.shape(), *cfg.surface) <= 0.0)
      fail(Errc::probe_intersects_surface,
           "probe " + std::to_string(i) + " touches the surface");
    if (cfg.obstacle && dist_sets(p.shape(), cfg.obstacle->shape) <= 0.0)
      fail(Errc::overlap_error, "probe " + std::to_string(i) + " touches the obstacle");
  }

  if (cfg.obstacle) {
    if (cfg.obstacle->sound_hard)
      scene.mask = rasterize_mask(scene.grid, cfg.obstacle->shape, sponge);
    else
      scene.gamma = build_material(scene.grid, cfg.obstacle->shape, cfg.obstacle->contrast);
  }

  if (cfg.surface) {
    scene.patches = make_surface_patches(*cfg.surface, scene.grid, cfg.surface_resolution);
    scene.surface_area = scene.patches.total_weight();
    // Patch nodes and offsets must be usable: strictly outside the obstacle
    // and inside the undamped interior.
    Vec3 ilo = scene.grid.lo() + Vec3{1, 1, 1} * (sponge * h);
    Vec3 ihi = scene.grid.hi() - Vec3{1, 1, 1} * (sponge * h);
    for (const auto& n : scene.patches.nodes) {
      for (const Vec3& q : {n.position, n.inner_offset, n.outer_offset}) {
        if (!(q.x > ilo.x && q.y > ilo.y && q.z > ilo.z && q.x < ihi.x &&
              q.y < ihi.y && q.z < ihi.z))
          fail(Errc::config_error, "surface nodes reach into the sponge shell");
        if (!trilinear_in_range(scene.grid, q))
          fail(Errc::config_error, "surface nodes leave the grid interior");
      }
      if (cfg.obstacle && cfg.obstacle->shape.sdf(n.inner_offset) <= 0.0)
        fail(Errc::config_error, "surface nodes touch the obstacle");
    }
  }
  return scene;
}

double resolve_T(const RunConfig& cfg, const ProbeBall& probe) {
  if (!cfg.solver.t_auto) return cfg.solver.T;
  if (!cfg.surface)
    fail(Errc::config_error, "automatic T needs a recording surface");
  Shape ball = probe.shape();
  double d_ob = dist_sets(*cfg.surface, ball);
  double base;
  if (cfg.obstacle) {
    base = 2.0 * dist_sets(cfg.obstacle->shape, ball) - d_ob;
  } else if (cfg.solver.distance_bound) {
    base = 2.0 * (*cfg.solver.distance_bound) - d_ob;
  } else {
    // No obstacle information at all: bound travel by the far side of the
    // surface as seen from the probe ball.
    auto [lo, hi] = cfg.surface->bounding_box();
    Vec3 c = (lo + hi) * 0.5;
    double rad = (hi - lo).norm() * 0.5;
    base = 2.0 * ((c - probe.center).norm() + rad + probe.radius) - d_ob;
  }
  return cfg.solver.T_factor * std::fmax(base, 10.0 * cfg.grid.h);
}

SolverConfig make_solver_config(const RunConfig& cfg, const Scene& scene,
                                const ProbeBall& probe, bool with_obstacle) {
  SolverConfig sc;
  sc.grid = scene.grid;
  sc.T = resolve_T(cfg, probe);
  sc.cfl = cfg.solver.cfl;
  sc.sponge = cfg.solver.sponge;
  sc.source_sampling = cfg.solver.source_sampling;
  sc.threads = cfg.solver.threads;
  sc.nan_check_every = cfg.solver.nan_check_every;
  sc.energy_every = cfg.solver.energy_every;
  if (with_obstacle && scene.mask) sc.mask = &*scene.mask;
  if (with_obstacle && scene.gamma) sc.gamma = &*scene.gamma;
  if (cfg.surface) sc.surface = &*cfg.surface;
  return sc;
}

}  // namespace encl
